#include "randpolar/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "randpolar/error.hpp"
#include "randpolar/polytope.hpp"

namespace randpolar
{

namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(const Body& body, const Vector& y)
{
    if (static_cast<std::size_t>(y.size()) != body.dim())
        throw std::invalid_argument("dimension mismatch: body is in R^"
                                    + std::to_string(body.dim()) + ", point has "
                                    + std::to_string(y.size()) + " coordinates");
}

// Support of B_q^N at A^T y without materializing A^T y.
double lq_matrix_support(const Matrix& a, double dual_q, const Vector& y)
{
    const Eigen::Index cols = a.cols();
    if (dual_q == kInf)
    {
        double m = 0.0;
        for (Eigen::Index j = 0; j < cols; ++j)
            m = std::max(m, std::abs(a.col(j).dot(y)));
        return m;
    }
    if (dual_q == 1.0)
    {
        double s = 0.0;
        for (Eigen::Index j = 0; j < cols; ++j)
            s += std::abs(a.col(j).dot(y));
        return s;
    }
    if (dual_q == 2.0)
        return (a.transpose() * y).norm();
    double s = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j)
        s += std::pow(std::abs(a.col(j).dot(y)), dual_q);
    return std::pow(s, 1.0 / dual_q);
}

bool hpolytope_bounded(std::span<const Halfspace> hs, std::size_t n,
                       std::span<const Vector> vertices)
{
    double extent = 1.0;
    for (const Vector& v : vertices)
        extent = std::max(extent, v.cwiseAbs().maxCoeff());
    const double L = 8.0 * extent;
    const double touch = L * (1.0 - 1e-9);
    switch (n)
    {
    case 1: {
        bool upper = false, lower = false;
        for (const Halfspace& h : hs)
        {
            upper = upper || h.normal(0) > 0.0;
            lower = lower || h.normal(0) < 0.0;
        }
        return upper && lower;
    }
    case 2: {
        for (const Vec2& p : clip_square(hs, L))
            if (p.cwiseAbs().maxCoeff() >= touch)
                return false;
        return true;
    }
    case 3: {
        Polyhedron p = Polyhedron::cube(L);
        for (const Halfspace& h : hs)
            p.clip(Vec3(h.normal(0), h.normal(1), h.normal(2)), h.offset);
        for (const auto& f : p.faces())
            for (const Vec3& v : f)
                if (v.cwiseAbs().maxCoeff() >= touch)
                    return false;
        return true;
    }
    default:
        return true;
    }
}

const DirectionGrid& cached_lattice(std::size_t n)
{
    static const DirectionGrid g1 = DirectionGrid::lattice(1, 1);
    static const DirectionGrid g2 = DirectionGrid::lattice(2, 4096);
    static const DirectionGrid g3 = DirectionGrid::lattice(3, 64);
    switch (n)
    {
    case 1: return g1;
    case 2: return g2;
    default: return g3;
    }
}

// Volume of the l_q unit ball in R^n.
double lq_ball_volume(std::size_t n, double q)
{
    const double dn = static_cast<double>(n);
    if (q == kInf)
        return std::pow(2.0, dn);
    return std::pow(2.0 * std::tgamma(1.0 + 1.0 / q), dn) / std::tgamma(1.0 + dn / q);
}
}  // namespace

double dual_exponent(double q)
{
    if (!(q >= 1.0))
        throw std::invalid_argument("l_q exponent must be >= 1");
    if (q == 1.0)
        return kInf;
    if (q == kInf)
        return 1.0;
    return q / (q - 1.0);
}

double lq_norm(const Vector& u, double q)
{
    if (q == kInf)
        return u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff();
    if (q == 1.0)
        return u.cwiseAbs().sum();
    if (q == 2.0)
        return u.norm();
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        s += std::pow(std::abs(u(i)), q);
    return std::pow(s, 1.0 / q);
}

//---------------------------------------------------------------------------//
// CoefficientGauge
//---------------------------------------------------------------------------//

CoefficientGauge CoefficientGauge::lq(std::size_t dim, double q)
{
    if (dim == 0)
        throw std::invalid_argument("gauge dimension must be >= 1");
    CoefficientGauge g;
    g.dim_ = dim;
    g.q_ = q;
    g.dual_q_ = dual_exponent(q);
    g.name_ = "lq";
    return g;
}

CoefficientGauge CoefficientGauge::oracle(std::size_t dim, Evaluator gauge, Evaluator support,
                                          bool unconditional, bool symmetric, std::string name)
{
    if (dim == 0)
        throw std::invalid_argument("gauge dimension must be >= 1");
    if (!gauge || !support)
        throw std::invalid_argument("gauge oracle needs both gauge and support evaluators");
    CoefficientGauge g;
    g.dim_ = dim;
    g.q_ = std::numeric_limits<double>::quiet_NaN();
    g.dual_q_ = std::numeric_limits<double>::quiet_NaN();
    g.gauge_ = std::move(gauge);
    g.support_ = std::move(support);
    g.unconditional_ = unconditional;
    g.symmetric_ = symmetric || unconditional;
    g.name_ = std::move(name);
    return g;
}

double CoefficientGauge::norm(const Vector& c) const
{
    return gauge_ ? gauge_(c) : lq_norm(c, q_);
}

double CoefficientGauge::support(const Vector& u) const
{
    return support_ ? support_(u) : lq_norm(u, dual_q_);
}

std::optional<double> CoefficientGauge::support_lower_constant() const
{
    if (!is_lq())
        return std::nullopt;
    if (dual_q_ <= 2.0)
        return 1.0;
    const double inv = (dual_q_ == kInf) ? 0.0 : 1.0 / dual_q_;
    return std::pow(static_cast<double>(dim_), inv - 0.5);
}

GaugeCheck check_gauge(const CoefficientGauge& gauge, RngStream rng, int samples)
{
    GaugeCheck check;
    RandomEngine eng(rng);
    const auto dim = static_cast<Eigen::Index>(gauge.dim());
    Vector u(dim);
    for (int s = 0; s < samples; ++s)
    {
        for (Eigen::Index i = 0; i < dim; ++i)
            u(i) = eng.normal();
        const double lambda = std::exp(3.0 * (eng.uniform() - 0.5));
        const double base = gauge.norm(u);
        const double scaled = gauge.norm(lambda * u);
        const double hom_err = std::abs(scaled - lambda * base) / std::max(1.0, std::abs(lambda * base));
        check.worst_violation = std::max(check.worst_violation, hom_err);
        if (hom_err > 1e-9)
            check.homogeneous = false;
        if (gauge.unconditional())
        {
            Vector flipped = u;
            for (Eigen::Index i = 0; i < dim; ++i)
                if (eng.uniform() < 0.5)
                    flipped(i) = -flipped(i);
            const double err = std::abs(gauge.norm(flipped) - base) / std::max(1.0, base);
            check.worst_violation = std::max(check.worst_violation, err);
            if (err > 1e-9)
                check.unconditional = false;
        }
    }
    return check;
}

//---------------------------------------------------------------------------//
// Body
//---------------------------------------------------------------------------//

Body Body::matrix_image(Matrix columns, CoefficientGauge gauge, double r)
{
    if (columns.rows() < 1)
        throw std::invalid_argument("matrix image needs n >= 1 rows");
    if (static_cast<std::size_t>(columns.cols()) != gauge.dim())
        throw std::invalid_argument("matrix has " + std::to_string(columns.cols())
                                    + " columns but the gauge lives in R^"
                                    + std::to_string(gauge.dim()));
    if (!(r >= 0.0) || !std::isfinite(r))
        throw std::invalid_argument("ball radius r must be finite and >= 0");
    if (!columns.allFinite())
        throw std::invalid_argument("matrix entries must be finite");
    const auto n = static_cast<std::size_t>(columns.rows());
    return Body(n, MatrixImage{std::move(columns), std::move(gauge), r});
}

Body Body::ball(std::size_t n, double radius)
{
    if (n == 0)
        throw std::invalid_argument("ball dimension must be >= 1");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("ball radius must be positive and finite");
    return Body(n, Ball{radius});
}

Body Body::hpolytope(std::vector<Vector> normals, std::vector<double> offsets)
{
    if (normals.empty() || normals.size() != offsets.size())
        throw std::invalid_argument("H-polytope needs matching, nonempty normals and offsets");
    const auto n = static_cast<std::size_t>(normals.front().size());
    if (n == 0)
        throw std::invalid_argument("H-polytope dimension must be >= 1");
    for (const Vector& a : normals)
        if (static_cast<std::size_t>(a.size()) != n)
            throw std::invalid_argument("H-polytope normals must share one dimension");
    for (double b : offsets)
        if (!(b > 0.0))
            throw std::invalid_argument("H-polytope must contain the origin in its interior");

    HPolytope poly{std::move(normals), std::move(offsets), {}};
    if (n <= 3)
    {
        std::vector<Halfspace> hs;
        for (std::size_t i = 0; i < poly.normals.size(); ++i)
            hs.push_back({poly.normals[i], poly.offsets[i]});
        poly.vertices = enumerate_vertices(hs, n);
        if (!hpolytope_bounded(hs, n, poly.vertices))
            throw std::invalid_argument("H-polytope is unbounded");
    }
    return Body(n, std::move(poly));
}

bool Body::symmetric() const
{
    if (const auto* m = as_matrix_image())
        return m->gauge.symmetric();
    if (as_ball())
        return true;
    const auto& p = std::get<HPolytope>(kind_);
    // Symmetric iff every facet has its mirror.
    for (std::size_t i = 0; i < p.normals.size(); ++i)
    {
        const Vector a = p.normals[i] / p.offsets[i];
        bool found = false;
        for (std::size_t j = 0; j < p.normals.size() && !found; ++j)
            found = (p.normals[j] / p.offsets[j] + a).norm() <= 1e-12 * (1.0 + a.norm());
        if (!found)
            return false;
    }
    return true;
}

//---------------------------------------------------------------------------//
// DirectionGrid
//---------------------------------------------------------------------------//

DirectionGrid::DirectionGrid(std::size_t dim, std::vector<Vector> dirs, double covering)
    : dim_(dim), directions_(std::move(dirs)), covering_radius_(covering)
{
    if (directions_.empty())
        throw std::invalid_argument("direction grid must be nonempty");
}

DirectionGrid DirectionGrid::lattice(std::size_t n, std::size_t resolution)
{
    std::vector<Vector> dirs;
    switch (n)
    {
    case 1:
        dirs.push_back(Vector::Constant(1, 1.0));
        dirs.push_back(Vector::Constant(1, -1.0));
        return DirectionGrid(1, std::move(dirs), 0.0);
    case 2: {
        if (resolution < 3)
            throw std::invalid_argument("planar lattice needs at least 3 directions");
        for (std::size_t k = 0; k < resolution; ++k)
        {
            const double phi = 2.0 * std::numbers::pi * static_cast<double>(k)
                               / static_cast<double>(resolution);
            Vector d(2);
            d << std::cos(phi), std::sin(phi);
            dirs.push_back(d);
        }
        const double covering
            = 2.0 * std::sin(std::numbers::pi / (2.0 * static_cast<double>(resolution)));
        return DirectionGrid(2, std::move(dirs), covering);
    }
    case 3: {
        if (resolution < 1)
            throw std::invalid_argument("cube-surface lattice needs resolution >= 1");
        const double step = 2.0 / static_cast<double>(resolution);
        for (int axis = 0; axis < 3; ++axis)
            for (double sign : {-1.0, 1.0})
                for (std::size_t i = 0; i <= resolution; ++i)
                    for (std::size_t j = 0; j <= resolution; ++j)
                    {
                        Vector p(3);
                        const double u = -1.0 + step * static_cast<double>(i);
                        const double v = -1.0 + step * static_cast<double>(j);
                        p(axis) = sign;
                        p((axis + 1) % 3) = u;
                        p((axis + 2) % 3) = v;
                        dirs.push_back(p.normalized());
                    }
        // Nearest face node is within step/sqrt(2); radial projection from
        // the cube surface onto the sphere is 1-Lipschitz.
        return DirectionGrid(3, std::move(dirs), step / std::numbers::sqrt2);
    }
    default:
        throw std::invalid_argument("lattice direction grids exist only for n <= 3");
    }
}

DirectionGrid DirectionGrid::random(std::size_t n, std::size_t count, RngStream rng)
{
    if (n == 0 || count == 0)
        throw std::invalid_argument("random direction grid needs n >= 1 and count >= 1");
    RandomEngine eng(rng);
    std::vector<Vector> dirs;
    dirs.reserve(count);
    const auto dim = static_cast<Eigen::Index>(n);
    while (dirs.size() < count)
    {
        Vector g(dim);
        for (Eigen::Index i = 0; i < dim; ++i)
            g(i) = eng.normal();
        const double len = g.norm();
        if (len > 1e-300)
            dirs.push_back(g / len);
    }
    return DirectionGrid(n, std::move(dirs), std::numeric_limits<double>::quiet_NaN());
}

//---------------------------------------------------------------------------//
// Oracles
//---------------------------------------------------------------------------//

double support_value(const Body& body, const Vector& y)
{
    require_dim(body, y);
    if (const auto* m = body.as_matrix_image())
    {
        double h;
        if (m->gauge.is_lq())
            h = lq_matrix_support(m->columns, dual_exponent(m->gauge.q()), y);
        else
            h = m->gauge.support(m->columns.transpose() * y);
        return (m->r > 0.0) ? h + m->r * y.norm() : h;
    }
    if (const auto* b = body.as_ball())
        return b->radius * y.norm();

    const auto& p = *body.as_hpolytope();
    if (body.dim() > 3)
        throw std::domain_error("H-polytope support values are only available for n <= 3");
    double h = -kInf;
    for (const Vector& v : p.vertices)
        h = std::max(h, v.dot(y));
    return h;
}

bool polar_membership(const Body& body, const Vector& y)
{
    return support_value(body, y) <= 1.0;
}

std::optional<double> polar_bounding_radius(const Body& body, const DirectionGrid& grid)
{
    if (grid.dim() != body.dim())
        throw std::invalid_argument("direction grid dimension does not match the body");
    if (const auto* m = body.as_matrix_image())
    {
        if (m->r > 0.0)
            return 1.0 / m->r;
        const auto n = static_cast<Eigen::Index>(body.dim());
        if (m->columns.cols() < n)
            return std::nullopt;
        Eigen::JacobiSVD<Matrix> svd(m->columns);
        const auto& sv = svd.singularValues();
        if (sv(n - 1) <= 1e-12 * std::max(sv(0), 1e-300))
            return std::nullopt;
    }
    if (const auto* b = body.as_ball())
        return 1.0 / b->radius;

    double hmin = kInf;
    for (const Vector& theta : grid.directions())
        hmin = std::min(hmin, support_value(body, theta));
    if (hmin < 1e-12)
        return std::nullopt;
    return 1.0 / hmin;
}

std::optional<double> polar_sampling_radius(const Body& body)
{
    if (const auto* b = body.as_ball())
        return 1.0 / b->radius;
    if (const auto* p = body.as_hpolytope())
    {
        double dmin = kInf;
        for (std::size_t i = 0; i < p->normals.size(); ++i)
            dmin = std::min(dmin, p->offsets[i] / p->normals[i].norm());
        return 1.0 / dmin;
    }

    const auto& m = *body.as_matrix_image();
    const auto n = static_cast<Eigen::Index>(body.dim());
    double best = (m.r > 0.0) ? 1.0 / m.r : kInf;

    double smin = 0.0;
    if (m.columns.cols() >= n)
    {
        Eigen::JacobiSVD<Matrix> svd(m.columns);
        const auto& sv = svd.singularValues();
        smin = sv(n - 1) > 1e-12 * std::max(sv(0), 1e-300) ? sv(n - 1) : 0.0;
    }
    if (smin == 0.0 && m.r == 0.0)
        return std::nullopt;
    if (smin > 0.0)
        if (auto c = m.gauge.support_lower_constant())
            best = std::min(best, 1.0 / (*c * smin));

    if (body.dim() <= 3)
    {
        const DirectionGrid& grid = cached_lattice(body.dim());
        double hmin = kInf, hmax = 0.0;
        for (const Vector& theta : grid.directions())
        {
            const double h = support_value(body, theta);
            hmin = std::min(hmin, h);
            hmax = std::max(hmax, h);
        }
        // h is sublinear, hence Lipschitz with constant max_S h <= hmax/(1-delta).
        const double delta = grid.covering_radius();
        const double lipschitz = hmax / (1.0 - delta);
        const double lower = hmin - lipschitz * delta;
        if (lower > 0.0)
            best = std::min(best, 1.0 / lower);
    }
    if (!std::isfinite(best))
        return std::nullopt;
    return best;
}

double hausdorff_estimate(const Body& a, const Body& b, const DirectionGrid& grid)
{
    if (a.dim() != b.dim() || grid.dim() != a.dim())
        throw std::invalid_argument("hausdorff_estimate: dimension mismatch");
    double d = 0.0;
    for (const Vector& theta : grid.directions())
    {
        const double ha = support_value(a, theta);
        const double hb = support_value(b, theta);
        if (!std::isfinite(ha) || !std::isfinite(hb))
            throw InfeasibleError("hausdorff_estimate: unbounded body");
        d = std::max(d, std::abs(ha - hb));
    }
    return d;
}

double unit_ball_volume(std::size_t n)
{
    const double dn = static_cast<double>(n);
    return std::pow(std::numbers::pi, 0.5 * dn) / std::tgamma(0.5 * dn + 1.0);
}

double unit_volume_ball_radius(std::size_t n)
{
    return std::pow(unit_ball_volume(n), -1.0 / static_cast<double>(n));
}

std::optional<double> body_volume(const Body& body)
{
    const std::size_t n = body.dim();
    if (const auto* b = body.as_ball())
        return unit_ball_volume(n) * std::pow(b->radius, static_cast<double>(n));
    if (const auto* p = body.as_hpolytope())
    {
        if (n > 3)
            return std::nullopt;
        std::vector<Halfspace> hs;
        for (std::size_t i = 0; i < p->normals.size(); ++i)
            hs.push_back({p->normals[i], p->offsets[i]});
        if (n == 1)
        {
            double lo = -kInf, hi = kInf;
            for (const Halfspace& h : hs)
            {
                if (h.normal(0) > 0)
                    hi = std::min(hi, h.offset / h.normal(0));
                else if (h.normal(0) < 0)
                    lo = std::max(lo, h.offset / h.normal(0));
            }
            return hi - lo;
        }
        return volume_from_vertices(hs, p->vertices, n);
    }
    const auto& m = *body.as_matrix_image();
    if (m.r == 0.0 && m.gauge.is_lq() && static_cast<std::size_t>(m.columns.cols()) == n)
        return std::abs(m.columns.determinant()) * lq_ball_volume(n, m.gauge.q());
    return std::nullopt;
}

}  // namespace randpolar
