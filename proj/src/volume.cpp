#include "randpolar/volume.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "randpolar/error.hpp"
#include "randpolar/parallel.hpp"
#include "randpolar/polytope.hpp"

namespace randpolar
{

namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

double ball_volume(std::size_t n, double radius)
{
    return unit_ball_volume(n) * std::pow(radius, static_cast<double>(n));
}

// Runs `per_point(eng, y)` over the budget in fixed chunks and merges the
// chunk statistics in chunk order.
template<class PerPoint>
Estimate run_chunks(std::size_t n, std::uint64_t budget, RngStream rng, unsigned threads,
                    PerPoint&& per_point)
{
    if (budget == 0)
        throw std::invalid_argument("Monte Carlo budget must be positive");
    const std::uint64_t chunks = (budget + kChunkSize - 1) / kChunkSize;
    std::vector<RunningStats> stats(chunks);
    parallel_for(chunks, threads, [&](std::size_t k) {
        RandomEngine eng(rng.substream(k));
        Vector y(static_cast<Eigen::Index>(n));
        const std::uint64_t count = std::min(kChunkSize, budget - k * kChunkSize);
        RunningStats s;
        for (std::uint64_t i = 0; i < count; ++i)
            s.add(per_point(eng, y));
        stats[k] = s;
    });
    RunningStats total;
    for (const RunningStats& s : stats)
        total.merge(s);
    return {total.mean(), total.std_error(), total.count(), rng.seed, chunks};
}

double sampling_radius(const Body& body, double measure_radius)
{
    const auto polar = polar_sampling_radius(body);
    return std::min(polar.value_or(kInf), measure_radius);
}

std::vector<Halfspace> symmetric_halfspaces(std::span<const Vector> points)
{
    std::vector<Halfspace> hs;
    hs.reserve(2 * points.size());
    for (const Vector& p : points)
    {
        if (p.norm() == 0.0)
            continue;
        hs.push_back({p, 1.0});
        hs.push_back({-p, 1.0});
    }
    return hs;
}

// sqrt(m) / sigma_min bounds every y with |<p_i, y>| <= 1; +inf if rank deficient.
double crosspoly_polar_bound(std::span<const Vector> points, std::size_t n)
{
    if (points.size() < n)
        return kInf;
    Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(points.size()));
    for (std::size_t j = 0; j < points.size(); ++j)
    {
        if (static_cast<std::size_t>(points[j].size()) != n)
            throw std::invalid_argument("point dimension does not match n");
        a.col(static_cast<Eigen::Index>(j)) = points[j];
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& sv = svd.singularValues();
    const double smin = sv(static_cast<Eigen::Index>(n) - 1);
    if (!(smin > 1e-12 * std::max(sv(0), 1e-300)))
        return kInf;
    return std::sqrt(static_cast<double>(points.size())) / smin;
}

// |(∩ hs) ∩ [-L, L]^n ∩ R B|; the box must contain the region of interest.
double clipped_measure(std::span<const Halfspace> hs, std::size_t n, double half_width,
                       double radius)
{
    switch (n)
    {
    case 1:
        return box_intersection_volume(hs, 1, std::min(half_width, radius));
    case 2: {
        const auto poly = clip_square(hs, half_width);
        return std::isinf(radius) ? polygon_area(poly) : polygon_disk_area(poly, radius);
    }
    case 3:
        if (!std::isinf(radius))
            throw std::invalid_argument("exact polar measure in R^3 needs R = +inf");
        return box_intersection_volume(hs, 3, half_width);
    default:
        throw std::invalid_argument("exact polar measures need n in {1, 2, 3}");
    }
}

void require_exact_dim(std::size_t n)
{
    if (n < 1 || n > 3)
        throw std::invalid_argument("exact polar volumes need n in {1, 2, 3}");
}
}  // namespace

void to_json(nlohmann::json& j, const Estimate& e)
{
    j = nlohmann::json{{"value", e.value},
                       {"stderr", e.std_error},
                       {"samples", e.samples},
                       {"seed", e.seed},
                       {"streams", e.streams}};
}

void RunningStats::merge(const RunningStats& other) noexcept
{
    if (other.count_ == 0)
        return;
    if (count_ == 0)
    {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double total = na + nb;
    const double d = other.mean_ - mean_;
    mean_ += d * nb / total;
    m2_ += other.m2_ + d * d * na * nb / total;
    count_ += other.count_;
}

double RunningStats::variance() const noexcept
{
    return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

double RunningStats::std_error() const noexcept
{
    return count_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_));
}

Estimate mc_polar_measure(const Body& body, const RadialMeasure& m, std::uint64_t budget,
                          RngStream rng, unsigned threads)
{
    if (body.dim() != m.dim())
        throw std::invalid_argument("body and measure dimensions differ");
    const std::size_t n = body.dim();
    const double radius = sampling_radius(body, m.support_radius());

    if (std::isfinite(radius))
    {
        const double vol = ball_volume(n, radius);
        return run_chunks(n, budget, rng, threads, [&](RandomEngine& eng, Vector& y) {
            sample_uniform_ball_into(radius, eng, y);
            return polar_membership(body, y) ? vol * m.rho(y.norm()) : 0.0;
        });
    }
    if (!m.finite_mass())
        throw InfeasibleError("the polar body is unbounded and " + m.describe()
                              + " has infinite mass; nu(K°) cannot be estimated");
    const RadialMeasureSampler sampler(m);
    const double mass = sampler.total_mass();
    return run_chunks(n, budget, rng, threads, [&](RandomEngine& eng, Vector& y) {
        sampler.sample_into(eng, y);
        return polar_membership(body, y) ? mass : 0.0;
    });
}

std::vector<double> default_level_grid(const RadialMeasure& m, std::size_t count, double ratio)
{
    if (count == 0 || !(ratio > 0.0 && ratio < 1.0))
        throw std::invalid_argument("level grid needs count >= 1 and ratio in (0, 1)");
    const double top = m.rho(0.0);
    std::vector<double> levels(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        const double e = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        levels[i] = top * std::pow(ratio, e);
    }
    std::sort(levels.begin(), levels.end());
    return levels;
}

LayerCakeResult layer_cake_measure(const Body& body, const RadialMeasure& m,
                                   std::vector<double> levels, std::uint64_t budget,
                                   RngStream rng, unsigned threads)
{
    if (body.dim() != m.dim())
        throw std::invalid_argument("body and measure dimensions differ");
    if (levels.empty())
        throw std::invalid_argument("layer cake needs at least one level");
    const double top = m.rho(0.0);
    if (!std::isfinite(top))
        throw InfeasibleError("layer cake needs a finite rho(0)");
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    if (!(levels.front() > 0.0) || levels.back() > top * (1.0 + 1e-15))
        throw std::invalid_argument("levels must lie in (0, rho(0)]");

    // Trapezoid weights on [0, rho(0)] with f(0) := f(t_1) and f(rho(0)) := f(t_m).
    const std::size_t count = levels.size();
    std::vector<double> weights(count, 0.0);
    std::vector<double> radii(count);
    weights[0] += levels[0];
    for (std::size_t i = 0; i + 1 < count; ++i)
    {
        const double h = levels[i + 1] - levels[i];
        weights[i] += 0.5 * h;
        weights[i + 1] += 0.5 * h;
    }
    weights[count - 1] += top - levels[count - 1];
    for (std::size_t i = 0; i < count; ++i)
        radii[i] = m.level_radius(levels[i]);

    const std::size_t n = body.dim();
    const double radius = sampling_radius(body, radii[0]);
    if (!std::isfinite(radius))
        throw InfeasibleError("layer cake needs a bounded polar or a bounded lowest level set");
    const double vol = ball_volume(n, radius);

    LayerCakeResult out;
    out.estimate = run_chunks(n, budget, rng, threads, [&](RandomEngine& eng, Vector& y) {
        sample_uniform_ball_into(radius, eng, y);
        if (!polar_membership(body, y))
            return 0.0;
        const double s = y.norm();
        double w = 0.0;
        for (std::size_t i = 0; i < count && radii[i] >= s; ++i)
            w += weights[i];
        return vol * w;
    });
    out.levels = std::move(levels);
    out.low_accuracy = count < 2;
    return out;
}

double exact_polar_volume_crosspoly(std::span<const Vector> points, std::size_t n)
{
    require_exact_dim(n);
    const double bound = crosspoly_polar_bound(points, n);
    if (!std::isfinite(bound))
        throw InfeasibleError("points do not span R^" + std::to_string(n)
                              + "; the polar is unbounded");
    const auto hs = symmetric_halfspaces(points);
    return clipped_measure(hs, n, bound * (1.0 + 1e-9), kInf);
}

double exact_polar_volume_crosspoly_enum(std::span<const Vector> points, std::size_t n)
{
    if (n != 2 && n != 3)
        throw std::invalid_argument("vertex enumeration route needs n in {2, 3}");
    if (!std::isfinite(crosspoly_polar_bound(points, n)))
        throw InfeasibleError("points do not span R^" + std::to_string(n)
                              + "; the polar is unbounded");
    const auto hs = symmetric_halfspaces(points);
    const auto vertices = enumerate_vertices(hs, n);
    return volume_from_vertices(hs, vertices, n);
}

double exact_polar_measure_crosspoly(std::span<const Vector> points, std::size_t n,
                                     double radius)
{
    require_exact_dim(n);
    if (!(radius > 0.0))
        throw std::invalid_argument("radius must be positive");
    const double bound = std::min(crosspoly_polar_bound(points, n) * (1.0 + 1e-9), radius);
    if (!std::isfinite(bound))
        throw InfeasibleError("points do not span R^" + std::to_string(n)
                              + " and the measure is not restricted to a ball");
    return clipped_measure(symmetric_halfspaces(points), n, bound, radius);
}

double exact_polar_measure_vertices(std::span<const Vector> vertices, std::size_t n,
                                    double radius)
{
    require_exact_dim(n);
    if (!(radius > 0.0))
        throw std::invalid_argument("radius must be positive");
    std::vector<Halfspace> hs;
    for (const Vector& v : vertices)
    {
        if (static_cast<std::size_t>(v.size()) != n)
            throw std::invalid_argument("vertex dimension does not match n");
        hs.push_back({v, 1.0});
    }
    if (std::isfinite(radius))
        return clipped_measure(hs, n, radius, radius);

    // Bound from the symmetric hull; confirmed by doubling since the vertex
    // set need not be symmetric.
    const double bound = crosspoly_polar_bound(vertices, n);
    if (!std::isfinite(bound))
        throw InfeasibleError("vertices do not span R^" + std::to_string(n));
    const double a = clipped_measure(hs, n, bound * (1.0 + 1e-9), kInf);
    const double b = clipped_measure(hs, n, 2.0 * bound, kInf);
    if (std::abs(a - b) > 1e-9 * std::max(a, 1.0))
        throw InfeasibleError("the polar of the vertex set is unbounded");
    return a;
}

std::optional<double> exact_polar_measure(const Body& body, const RadialMeasure& m)
{
    if (body.dim() != m.dim())
        throw std::invalid_argument("body and measure dimensions differ");
    if (const auto* b = body.as_ball())
        return m.mass_within(1.0 / b->radius);

    const auto* leb = std::get_if<RadialMeasure::LebesgueBall>(&m.kind());
    const std::size_t n = body.dim();
    if (!leb || n > 3 || (n == 3 && std::isfinite(leb->radius)))
        return std::nullopt;

    if (const auto* mi = body.as_matrix_image())
    {
        if (!mi->gauge.is_lq() || mi->gauge.q() != 1.0 || mi->r != 0.0)
            return std::nullopt;
        std::vector<Vector> pts;
        for (Eigen::Index j = 0; j < mi->columns.cols(); ++j)
            pts.emplace_back(mi->columns.col(j));
        return exact_polar_measure_crosspoly(pts, n, leb->radius);
    }
    const auto& hp = *body.as_hpolytope();
    if (hp.vertices.empty())
        return std::nullopt;
    return exact_polar_measure_vertices(hp.vertices, n, leb->radius);
}

}  // namespace randpolar
