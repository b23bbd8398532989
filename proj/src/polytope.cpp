#include "randpolar/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace randpolar
{

namespace
{
double cross2(const Vec2& u, const Vec2& v)
{
    return u.x() * v.y() - u.y() * v.x();
}

// Signed area of triangle (0, p, q) intersected with the disk of radius R.
double triangle_disk_area(const Vec2& p, const Vec2& q, double radius)
{
    const Vec2 d = q - p;
    const double a = d.squaredNorm();
    if (a == 0.0)
        return 0.0;
    const double b = 2.0 * p.dot(d);
    const double c = p.squaredNorm() - radius * radius;
    const double disc = b * b - 4.0 * a * c;

    std::vector<Vec2> pts{p};
    if (disc > 0.0)
    {
        const double sq = std::sqrt(disc);
        for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)})
            if (t > 0.0 && t < 1.0)
                pts.push_back(p + t * d);
    }
    pts.push_back(q);

    double area = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    {
        const Vec2& u = pts[i];
        const Vec2& v = pts[i + 1];
        // Chords have their midpoint strictly inside; tangent pieces are arcs.
        const Vec2 mid = 0.5 * (u + v);
        if (mid.squaredNorm() < radius * radius)
            area += 0.5 * cross2(u, v);
        else
            area += 0.5 * radius * radius * std::atan2(cross2(u, v), u.dot(v));
    }
    return area;
}

Vec3 newell_normal(const std::vector<Vec3>& poly)
{
    Vec3 n = Vec3::Zero();
    for (std::size_t i = 0; i < poly.size(); ++i)
        n += poly[i].cross(poly[(i + 1) % poly.size()]);
    return n;
}

// Orthonormal basis (u, v) of the plane with normal `a`.
std::pair<Vec3, Vec3> plane_basis(const Vec3& a)
{
    const Vec3 n = a.normalized();
    const Vec3 helper
        = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 u = n.cross(helper).normalized();
    return {u, n.cross(u)};
}

// Convex polygon loop through coplanar points lying on the plane <a,x> = b.
std::vector<Vec3> planar_hull(const std::vector<Vec3>& pts, const Vec3& a)
{
    if (pts.size() < 3)
        return {};
    const auto [u, v] = plane_basis(a);
    const Vec3 origin = pts.front();
    std::vector<Vec2> flat;
    flat.reserve(pts.size());
    for (const Vec3& p : pts)
        flat.emplace_back((p - origin).dot(u), (p - origin).dot(v));
    const std::vector<Vec2> hull = convex_hull_2d(flat);
    std::vector<Vec3> loop;
    loop.reserve(hull.size());
    for (const Vec2& h : hull)
        loop.push_back(origin + h.x() * u + h.y() * v);
    return loop;
}
}  // namespace

double polygon_area(std::span<const Vec2> poly)
{
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        twice += cross2(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * std::abs(twice);
}

std::vector<Vec2> clip_polygon(std::span<const Vec2> poly, const Vec2& a, double b)
{
    std::vector<Vec2> out;
    if (poly.empty())
        return out;
    out.reserve(poly.size() + 1);
    for (std::size_t i = 0; i < poly.size(); ++i)
    {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        const double dp = a.dot(p) - b;
        const double dq = a.dot(q) - b;
        if (dp <= 0.0)
            out.push_back(p);
        if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0))
            out.push_back(p + (dp / (dp - dq)) * (q - p));
    }
    if (out.size() < 3)
        out.clear();
    return out;
}

std::vector<Vec2> clip_square(std::span<const Halfspace> hs, double half_width)
{
    const double L = half_width;
    std::vector<Vec2> poly{{-L, -L}, {L, -L}, {L, L}, {-L, L}};
    for (const Halfspace& h : hs)
    {
        if (h.normal.size() != 2)
            throw std::invalid_argument("clip_square: half-space dimension must be 2");
        poly = clip_polygon(poly, Vec2(h.normal(0), h.normal(1)), h.offset);
        if (poly.empty())
            break;
    }
    return poly;
}

double polygon_disk_area(std::span<const Vec2> poly, double radius)
{
    if (std::isinf(radius))
        return polygon_area(poly);
    double area = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        area += triangle_disk_area(poly[i], poly[(i + 1) % poly.size()], radius);
    return std::abs(area);
}

double slab_disk_area(double a_norm, double radius)
{
    if (a_norm == 0.0 || 1.0 / a_norm >= radius)
        return std::numbers::pi * radius * radius;
    const double w = 1.0 / a_norm;
    return 2.0 * (w * std::sqrt(radius * radius - w * w) + radius * radius * std::asin(w / radius));
}

Polyhedron Polyhedron::cube(double half_width)
{
    const double L = half_width;
    Polyhedron p;
    p.scale_ = L;
    auto corner = [L](int i, int j, int k) { return Vec3(i ? L : -L, j ? L : -L, k ? L : -L); };
    p.faces_ = {
        {corner(0, 0, 0), corner(0, 1, 0), corner(1, 1, 0), corner(1, 0, 0)},
        {corner(0, 0, 1), corner(1, 0, 1), corner(1, 1, 1), corner(0, 1, 1)},
        {corner(0, 0, 0), corner(1, 0, 0), corner(1, 0, 1), corner(0, 0, 1)},
        {corner(0, 1, 0), corner(0, 1, 1), corner(1, 1, 1), corner(1, 1, 0)},
        {corner(0, 0, 0), corner(0, 0, 1), corner(0, 1, 1), corner(0, 1, 0)},
        {corner(1, 0, 0), corner(1, 1, 0), corner(1, 1, 1), corner(1, 0, 1)},
    };
    return p;
}

void Polyhedron::clip(const Vec3& a, double b)
{
    const double an = a.norm();
    if (an == 0.0)
    {
        if (b < 0.0)
            faces_.clear();
        return;
    }
    const double eps = 1e-12 * scale_ * an;
    std::vector<std::vector<Vec3>> kept;
    std::vector<Vec3> cap;
    bool plane_is_face = false;
    kept.reserve(faces_.size() + 1);
    for (const auto& face : faces_)
    {
        plane_is_face = plane_is_face || std::all_of(face.begin(), face.end(), [&](const Vec3& p) {
            return std::abs(a.dot(p) - b) <= eps;
        });
        std::vector<Vec3> out;
        out.reserve(face.size() + 1);
        for (std::size_t i = 0; i < face.size(); ++i)
        {
            const Vec3& p = face[i];
            const Vec3& q = face[(i + 1) % face.size()];
            const double dp = a.dot(p) - b;
            const double dq = a.dot(q) - b;
            if (dp <= eps)
            {
                out.push_back(p);
                if (dp >= -eps)
                    cap.push_back(p);
            }
            if ((dp < -eps && dq > eps) || (dp > eps && dq < -eps))
            {
                const Vec3 x = p + (dp / (dp - dq)) * (q - p);
                out.push_back(x);
                cap.push_back(x);
            }
        }
        if (out.size() >= 3)
            kept.push_back(std::move(out));
    }
    // A plane that merely supports an existing face adds no new face.
    if (!plane_is_face)
    {
        std::vector<Vec3> cap_loop = planar_hull(cap, a);
        if (cap_loop.size() >= 3 && newell_normal(cap_loop).norm() > 1e-14 * scale_ * scale_)
            kept.push_back(std::move(cap_loop));
    }
    faces_ = std::move(kept);
    if (faces_.size() < 4)
        faces_.clear();
}

double Polyhedron::volume() const
{
    if (faces_.empty())
        return 0.0;
    Vec3 centre = Vec3::Zero();
    std::size_t count = 0;
    for (const auto& f : faces_)
        for (const Vec3& p : f)
        {
            centre += p;
            ++count;
        }
    centre /= static_cast<double>(count);
    double vol = 0.0;
    for (const auto& f : faces_)
    {
        const Vec3 n = newell_normal(f);
        const double twice_area = n.norm();
        if (twice_area == 0.0)
            continue;
        const double dist = std::abs(n.dot(f.front() - centre)) / twice_area;
        vol += 0.5 * twice_area * dist / 3.0;
    }
    return vol;
}

double box_intersection_volume(std::span<const Halfspace> hs, std::size_t n,
                               double half_width)
{
    switch (n)
    {
    case 1: {
        double lo = -half_width, hi = half_width;
        for (const Halfspace& h : hs)
        {
            const double a = h.normal(0);
            if (a > 0.0)
                hi = std::min(hi, h.offset / a);
            else if (a < 0.0)
                lo = std::max(lo, h.offset / a);
            else if (h.offset < 0.0)
                return 0.0;
        }
        return std::max(0.0, hi - lo);
    }
    case 2:
        return polygon_area(clip_square(hs, half_width));
    case 3: {
        Polyhedron p = Polyhedron::cube(half_width);
        for (const Halfspace& h : hs)
        {
            p.clip(Vec3(h.normal(0), h.normal(1), h.normal(2)), h.offset);
            if (p.empty())
                return 0.0;
        }
        return p.volume();
    }
    default:
        throw std::invalid_argument("box_intersection_volume: dimension must be 1, 2 or 3");
    }
}

std::vector<Eigen::VectorXd> enumerate_vertices(std::span<const Halfspace> hs,
                                                std::size_t n, double tol)
{
    if (n < 1 || n > 3)
        throw std::invalid_argument("enumerate_vertices: dimension must be 1, 2 or 3");
    const std::size_t m = hs.size();
    double scale = 1.0;
    for (const Halfspace& h : hs)
        scale = std::max(scale, std::abs(h.offset) / std::max(h.normal.norm(), 1e-300));

    std::vector<Eigen::VectorXd> verts;
    auto feasible = [&](const Eigen::VectorXd& x) {
        for (const Halfspace& h : hs)
            if (h.normal.dot(x) - h.offset > tol * std::max(1.0, h.normal.norm() * scale))
                return false;
        return true;
    };
    auto add = [&](const Eigen::VectorXd& x) {
        if (!x.allFinite() || !feasible(x))
            return;
        for (const auto& v : verts)
            if ((v - x).norm() <= tol * scale)
                return;
        verts.push_back(x);
    };

    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd b(n);
    std::vector<std::size_t> idx(n);
    // Iterate over all n-subsets in lexicographic order.
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = i;
    if (m < n)
        return verts;
    while (true)
    {
        for (std::size_t r = 0; r < n; ++r)
        {
            A.row(r) = hs[idx[r]].normal.transpose();
            b(r) = hs[idx[r]].offset;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        lu.setThreshold(1e-12);
        if (lu.isInvertible())
            add(lu.solve(b));

        std::size_t k = n;
        while (k > 0 && idx[k - 1] == m - n + (k - 1))
            --k;
        if (k == 0)
            break;
        ++idx[k - 1];
        for (std::size_t j = k; j < n; ++j)
            idx[j] = idx[j - 1] + 1;
    }
    return verts;
}

double volume_from_vertices(std::span<const Halfspace> hs,
                            std::span<const Eigen::VectorXd> vertices, std::size_t n,
                            double tol)
{
    if (vertices.size() < n + 1)
        return 0.0;
    double scale = 1.0;
    for (const auto& v : vertices)
        scale = std::max(scale, v.norm());

    if (n == 2)
    {
        std::vector<Vec2> pts;
        for (const auto& v : vertices)
            pts.emplace_back(v(0), v(1));
        return polygon_area(convex_hull_2d(pts));
    }
    if (n != 3)
        throw std::invalid_argument("volume_from_vertices: dimension must be 2 or 3");

    // Deduplicate planes by normalized (a, b).
    std::vector<std::pair<Vec3, double>> planes;
    for (const Halfspace& h : hs)
    {
        const double an = h.normal.norm();
        if (an == 0.0)
            continue;
        const Vec3 a = Vec3(h.normal(0), h.normal(1), h.normal(2)) / an;
        const double b = h.offset / an;
        const bool dup = std::any_of(planes.begin(), planes.end(), [&](const auto& p) {
            return (p.first - a).norm() <= 1e-12 && std::abs(p.second - b) <= 1e-12 * scale;
        });
        if (!dup)
            planes.emplace_back(a, b);
    }

    Vec3 centre = Vec3::Zero();
    for (const auto& v : vertices)
        centre += Vec3(v(0), v(1), v(2));
    centre /= static_cast<double>(vertices.size());

    double vol = 0.0;
    for (const auto& [a, b] : planes)
    {
        std::vector<Vec3> on;
        for (const auto& v : vertices)
        {
            const Vec3 p(v(0), v(1), v(2));
            if (std::abs(a.dot(p) - b) <= tol * scale)
                on.push_back(p);
        }
        const std::vector<Vec3> facet = planar_hull(on, a);
        if (facet.size() < 3)
            continue;
        const double area = 0.5 * newell_normal(facet).norm();
        vol += area * std::abs(b - a.dot(centre)) / 3.0;
    }
    return vol;
}

std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts)
{
    std::sort(pts.begin(), pts.end(), [](const Vec2& p, const Vec2& q) {
        return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
    });
    if (pts.size() < 3)
        return pts;
    double scale = 0.0;
    for (const Vec2& p : pts)
        scale = std::max(scale, p.norm());
    // Near-duplicates (clipping the same edge from two faces) would make the
    // orientation tests below meaningless, so merge them first.
    std::vector<Vec2> unique;
    unique.reserve(pts.size());
    for (const Vec2& p : pts)
        if (std::none_of(unique.begin(), unique.end(),
                         [&](const Vec2& q) { return (p - q).norm() <= 1e-12 * scale; }))
            unique.push_back(p);
    pts = std::move(unique);
    if (pts.size() < 3)
        return pts;
    const double eps = 1e-14 * std::max(scale * scale, 1e-300);
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= eps)
            --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;)
    {
        while (k >= t && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= eps)
            --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace randpolar
