#include "randpolar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "randpolar/error.hpp"
#include "randpolar/parallel.hpp"
#include "randpolar/polytope.hpp"
#include "randpolar/quadrature.hpp"
#include "randpolar/volume.hpp"

namespace randpolar
{

namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

// Index of the grid point equal to x (up to rounding), or npos.
std::size_t find_point(const std::vector<double>& grid, double x, double scale)
{
    const double tol = 1e-9 * scale;
    auto it = std::lower_bound(grid.begin(), grid.end(), x - tol);
    if (it != grid.end() && std::abs(*it - x) <= tol)
        return static_cast<std::size_t>(it - grid.begin());
    return std::string::npos;
}

// Infinite ends are split off at +-1 and integrated in s = log|x|, which
// turns algebraic tails into exponentially decaying ones.
double integrate_interval_or_line(const std::function<double(double)>& f, double lo, double hi,
                                  const QuadOptions& opt)
{
    if (std::isfinite(lo) && std::isfinite(hi))
        return integrate_range(f, lo, hi, opt);
    const double core_lo = std::isfinite(lo) ? lo : std::min(-1.0, hi);
    const double core_hi = std::isfinite(hi) ? hi : std::max(1.0, lo);
    double total = core_lo < core_hi ? integrate_range(f, core_lo, core_hi, opt) : 0.0;
    auto tail = [&](double start, double sign) {
        auto g = [&](double s) {
            const double r = start * std::exp(s);
            return std::isfinite(r) ? f(sign * r) * r : 0.0;
        };
        return integrate_range(g, 0.0, kInf, opt);
    };
    if (!std::isfinite(hi))
        total += tail(core_hi, 1.0);
    if (!std::isfinite(lo))
        total += tail(-core_lo, -1.0);
    return total;
}
}  // namespace

//---------------------------------------------------------------------------//
// Profiles
//---------------------------------------------------------------------------//

std::string profile_csv(const ProfileReport& p)
{
    std::ostringstream os;
    os.precision(17);
    os << "t,value,stderr\n";
    for (std::size_t i = 0; i < p.t.size(); ++i)
        os << p.t[i] << ',' << p.value[i] << ',' << p.std_error[i] << '\n';
    return os.str();
}

nlohmann::json profile_json(const ProfileReport& p)
{
    nlohmann::json j;
    j["method"] = p.method;
    j["direction"] = p.direction;
    j["t"] = p.t;
    j["value"] = p.value;
    j["stderr"] = p.std_error;
    j["tolerance"] = p.tolerance;
    j["sigma_multiplier"] = p.sigma_multiplier;
    j["verdict"] = {{"even", p.verdict.even},
                    {"midpoint_convex", p.verdict.midpoint_convex},
                    {"reciprocal_quasi_concave", p.verdict.reciprocal_quasi_concave},
                    {"worst_violation", p.verdict.worst_violation},
                    {"triples_checked", p.verdict.triples_checked},
                    {"pairs_checked", p.verdict.pairs_checked}};
    return j;
}

ProfileVerdict convexity_even_check(const ProfileReport& p, double tol, double sigma_mult)
{
    const auto& t = p.t;
    const auto& g = p.value;
    if (g.size() != t.size())
        throw std::invalid_argument("profile values and grid differ in length");
    if (!std::is_sorted(t.begin(), t.end()))
        throw std::invalid_argument("profile grid must be sorted");
    auto se = [&](std::size_t i) { return i < p.std_error.size() ? p.std_error[i] : 0.0; };

    double scale = 1.0;
    for (double x : t)
        scale = std::max(scale, std::abs(x));

    ProfileVerdict v;
    auto record = [&](double violation, double allowed) {
        v.worst_violation = std::max(v.worst_violation, violation);
        v.worst_excess = std::max(v.worst_excess, violation - allowed);
        return violation <= allowed;
    };

    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t k = i + 2; k < t.size(); ++k)
        {
            const std::size_t j = find_point(t, 0.5 * (t[i] + t[k]), scale);
            if (j == std::string::npos || j == i || j == k)
                continue;
            ++v.triples_checked;
            const double sigma
                = std::sqrt(se(j) * se(j) + 0.25 * (se(i) * se(i) + se(k) * se(k)));
            const double allowed = tol + sigma_mult * sigma;
            if (!record(g[j] - 0.5 * (g[i] + g[k]), allowed))
                v.midpoint_convex = false;
            // 1/g quasi-concave at the midpoint iff g(mid) <= max(g_i, g_k).
            if (g[j] - std::max(g[i], g[k]) > allowed)
                v.reciprocal_quasi_concave = false;
        }

    for (std::size_t i = 0; i < t.size(); ++i)
    {
        if (t[i] < 0.0)
            continue;
        const std::size_t j = find_point(t, -t[i], scale);
        if (j == std::string::npos)
        {
            v.even = false;
            continue;
        }
        if (j == i)
            continue;
        ++v.pairs_checked;
        const double allowed = tol + sigma_mult * std::sqrt(se(i) * se(i) + se(j) * se(j));
        if (!record(std::abs(g[i] - g[j]), allowed))
            v.even = false;
    }
    return v;
}

//---------------------------------------------------------------------------//
// Shadow systems
//---------------------------------------------------------------------------//

void validate_shadow_config(const ShadowConfig& cfg)
{
    const auto n = static_cast<std::size_t>(cfg.theta.size());
    if (n == 0)
        throw std::invalid_argument("theta must be nonempty");
    if (std::abs(cfg.theta.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("theta must be a unit vector");
    if (cfg.base.empty())
        throw std::invalid_argument("shadow system needs at least one base position");
    for (std::size_t i = 0; i < cfg.base.size(); ++i)
    {
        const Vector& y = cfg.base[i];
        if (static_cast<std::size_t>(y.size()) != n)
            throw std::invalid_argument("base position " + std::to_string(i)
                                        + " has the wrong dimension");
        if (std::abs(y.dot(cfg.theta)) > 1e-12 * std::max(1.0, y.norm()))
            throw std::invalid_argument("base position " + std::to_string(i)
                                        + " is not orthogonal to theta");
    }
    if (cfg.gauge.dim() != cfg.base.size())
        throw std::invalid_argument("gauge dimension must equal the number of base positions");
    if (!cfg.gauge.symmetric())
        throw std::invalid_argument("shadow profiles need an origin-symmetric gauge");
    if (!(cfg.r >= 0.0))
        throw std::invalid_argument("r must be >= 0");
    if (cfg.measure.dim() != n)
        throw std::invalid_argument("measure dimension differs from theta");
}

Body shadow_body(const ShadowConfig& cfg, const std::vector<double>& direction, double t)
{
    const auto n = cfg.theta.size();
    const auto count = static_cast<Eigen::Index>(cfg.base.size());
    if (direction.size() != cfg.base.size())
        throw std::invalid_argument("direction must have one entry per base position");
    Matrix cols(n, count);
    for (Eigen::Index i = 0; i < count; ++i)
        cols.col(i) = cfg.base[static_cast<std::size_t>(i)]
                      + t * direction[static_cast<std::size_t>(i)] * cfg.theta;
    return Body::matrix_image(std::move(cols), cfg.gauge, cfg.r);
}

bool shadow_exact_available(const ShadowConfig& cfg)
{
    const auto* leb = std::get_if<RadialMeasure::LebesgueBall>(&cfg.measure.kind());
    const auto n = cfg.measure.dim();
    return cfg.gauge.is_lq() && cfg.gauge.q() == 1.0 && cfg.r == 0.0 && leb != nullptr
           && (n <= 2 || (n == 3 && std::isinf(leb->radius)));
}

ProfileReport shadow_profile(const ShadowConfig& cfg, const std::vector<double>& direction,
                             const std::vector<double>& t_grid, std::uint64_t budget,
                             RngStream rng, ProfileEstimator estimator, unsigned threads)
{
    validate_shadow_config(cfg);
    if (t_grid.size() < 3 || !std::is_sorted(t_grid.begin(), t_grid.end()))
        throw std::invalid_argument("t grid must be sorted with at least 3 points");
    double scale = 1.0;
    for (double x : t_grid)
        scale = std::max(scale, std::abs(x));
    for (double x : t_grid)
        if (find_point(t_grid, -x, scale) == std::string::npos)
            throw std::invalid_argument("t grid must be symmetric about 0");

    std::vector<double> dir = direction;
    const double len = std::sqrt(std::inner_product(dir.begin(), dir.end(), dir.begin(), 0.0));
    if (!(len > 0.0))
        throw std::invalid_argument("direction must be nonzero");
    for (double& d : dir)
        d /= len;

    bool exact = false;
    switch (estimator)
    {
    case ProfileEstimator::automatic: exact = shadow_exact_available(cfg); break;
    case ProfileEstimator::exact:
        if (!shadow_exact_available(cfg))
            throw std::invalid_argument(
                "exact shadow profile needs C = B_1^N, r = 0 and Lebesgue measure (n <= 2, or n = 3 with R = inf)");
        exact = true;
        break;
    case ProfileEstimator::monte_carlo: exact = false; break;
    }

    ProfileReport rep;
    rep.t = t_grid;
    rep.direction = dir;
    rep.value.resize(t_grid.size());
    rep.std_error.assign(t_grid.size(), 0.0);
    for (std::size_t i = 0; i < t_grid.size(); ++i)
    {
        const Body body = shadow_body(cfg, dir, t_grid[i]);
        double v, se = 0.0;
        if (exact)
            v = *exact_polar_measure(body, cfg.measure);
        else
        {
            const Estimate e = mc_polar_measure(body, cfg.measure, budget, rng.substream(i), threads);
            v = e.value;
            se = e.std_error;
        }
        if (!(v > 0.0))
            throw NumericalError("polar measure vanished at t = " + std::to_string(t_grid[i]));
        rep.value[i] = 1.0 / v;
        rep.std_error[i] = se / (v * v);
    }
    rep.method = exact ? "exact" : "monte_carlo";
    rep.tolerance = exact ? 1e-9 : 0.0;
    rep.sigma_multiplier = exact ? 0.0 : 3.0;
    rep.verdict = convexity_even_check(rep, rep.tolerance, rep.sigma_multiplier);
    return rep;
}

//---------------------------------------------------------------------------//
// Gauges
//---------------------------------------------------------------------------//

double busemann_gauge(const DensityOracle& psi, const Vector& z)
{
    const double len = z.norm();
    if (len == 0.0)
        return 0.0;
    const double mass = nu_plus_hyperplane(psi, z / len);
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw NumericalError("hyperplane measure is zero or not finite");
    return len / mass;
}

ConcavityCheck concavity_spot_check(const DensityOracle& psi, RngStream rng, std::size_t segments)
{
    const double radius = std::isfinite(psi.support_radius) ? psi.support_radius : 3.0;
    const double power = -1.0 / static_cast<double>(psi.dim);
    auto kernel = [&](const Vector& x) {
        const double v = psi.eval(x);
        return v > 0.0 ? std::pow(v, power) : kInf;
    };
    RandomEngine eng(rng);
    Vector a(static_cast<Eigen::Index>(psi.dim)), b(a.size());
    ConcavityCheck c;
    for (std::size_t s = 0; s < segments; ++s)
    {
        sample_uniform_ball_into(radius, eng, a);
        sample_uniform_ball_into(radius, eng, b);
        ++c.segments;
        const double ka = kernel(a), kb = kernel(b);
        if (std::isinf(ka) || std::isinf(kb))
            continue;
        const Vector mid = 0.5 * (a + b);
        const double km = kernel(mid);
        const double chord = 0.5 * (ka + kb);
        const double violation = std::isinf(km) ? kInf : km - chord;
        c.worst_violation = std::max(c.worst_violation, violation);
        if (violation > 1e-10 * std::max(1.0, chord))
            c.verified = false;
    }
    return c;
}

double milman_pajor_gauge(const DensityOracle& phi, const std::vector<Vector>& subspace,
                          double p, const Vector& v)
{
    const std::size_t n = phi.dim;
    if (n == 0 || n > 3)
        throw std::invalid_argument("milman_pajor_gauge: ambient dimension must be 1, 2 or 3");
    if (!(p > 0.0))
        throw std::invalid_argument("milman_pajor_gauge: p must be positive");
    if (static_cast<std::size_t>(v.size()) != n)
        throw std::invalid_argument("milman_pajor_gauge: dimension mismatch");
    const double len = v.norm();
    if (len == 0.0)
        return 0.0;
    if (subspace.size() >= n)
        throw std::invalid_argument("milman_pajor_gauge: E must be a proper subspace");

    // Orthonormal basis of E.
    std::vector<Vector> basis;
    for (const Vector& e : subspace)
    {
        if (static_cast<std::size_t>(e.size()) != n)
            throw std::invalid_argument("milman_pajor_gauge: basis vector has wrong dimension");
        Vector w = e;
        for (const Vector& q : basis)
            w -= w.dot(q) * q;
        if (w.norm() < 1e-12 * std::max(1.0, e.norm()))
            throw std::invalid_argument("milman_pajor_gauge: basis vectors are dependent");
        basis.push_back(w / w.norm());
    }
    const Vector vhat = v / len;
    for (const Vector& q : basis)
        if (std::abs(q.dot(vhat)) > 1e-9)
            throw std::invalid_argument("milman_pajor_gauge: v must be orthogonal to E");

    const double S = phi.support_radius;
    const bool bounded = std::isfinite(S);
    QuadOptions inner;
    inner.rel_tol = 1e-10;
    inner.abs_tol = 1e-16;
    QuadOptions outer;
    outer.rel_tol = 1e-9;
    outer.abs_tol = 1e-15;

    Vector x(static_cast<Eigen::Index>(n));
    // Integral of phi over the affine slice s vhat + E.
    auto slice = [&](double s) -> double {
        const Vector origin = s * vhat;
        if (basis.empty())
            return phi.eval(origin);
        const double reach = bounded ? std::sqrt(std::max(0.0, S * S - s * s)) : kInf;
        if (bounded && reach == 0.0)
            return 0.0;
        if (basis.size() == 1)
        {
            auto line = [&](double a) {
                x = origin + a * basis[0];
                return phi.eval(x);
            };
            return integrate_range(line, -reach, reach, inner);
        }
        auto row = [&](double a) -> double {
            const double reach2 = bounded ? std::sqrt(std::max(0.0, reach * reach - a * a)) : kInf;
            if (bounded && reach2 == 0.0)
                return 0.0;
            auto col = [&](double b) {
                x = origin + a * basis[0] + b * basis[1];
                return phi.eval(x);
            };
            return integrate_range(col, -reach2, reach2, inner);
        };
        return integrate_range(row, -reach, reach, inner);
    };
    // integral_0^inf s^{p-1} slice(s) ds with u = s^p.
    auto radial = [&](double u) { return slice(std::pow(u, 1.0 / p)); };
    const double upper = bounded ? std::pow(S, p) : kInf;
    const double integral = integrate_range(radial, 0.0, upper, outer) / p;
    if (!(integral > 0.0) || !std::isfinite(integral))
        throw NumericalError("milman_pajor_gauge: integral is zero or divergent");
    return len * std::pow(integral, -1.0 / p);
}

double ball_bobkov_gauge(const DensityOracle& f, double p, const Vector& x)
{
    if (!(p > 0.0))
        throw std::invalid_argument("ball_bobkov_gauge: p must be positive");
    if (static_cast<std::size_t>(x.size()) != f.dim)
        throw std::invalid_argument("ball_bobkov_gauge: dimension mismatch");
    const double len = x.norm();
    if (len == 0.0)
        return 0.0;
    const Vector xhat = x / len;
    Vector y(x.size());
    auto integrand = [&](double u) {
        y = std::pow(u, 1.0 / p) * xhat;
        return f.eval(y);
    };
    QuadOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-16;
    const double upper = std::isfinite(f.support_radius) ? std::pow(f.support_radius, p) : kInf;
    const double integral = integrate_range(integrand, 0.0, upper, opt) / p;
    if (!(integral > 0.0) || !std::isfinite(integral))
        throw NumericalError("ball_bobkov_gauge: radial integral is zero or divergent");
    return len * std::pow(integral, -1.0 / p);
}

//---------------------------------------------------------------------------//
// Brunn profiles
//---------------------------------------------------------------------------//

BrunnOracle BrunnOracle::hyperbolic(std::size_t n)
{
    return {n, [](double t, const Vector& x) { return std::sqrt(1.0 + t * t + x.squaredNorm()); },
            kInf, "hyperbolic"};
}

BrunnOracle BrunnOracle::exp_abs(std::size_t n)
{
    return {n, [](double t, const Vector& x) { return std::exp(std::abs(t) + x.norm()); }, kInf,
            "exp_abs"};
}

BrunnOracle BrunnOracle::constant(std::size_t n, double c, double half_width)
{
    return {n,
            [c, half_width](double, const Vector& x) {
                return x.cwiseAbs().maxCoeff() <= half_width ? c : kInf;
            },
            half_width * std::sqrt(static_cast<double>(n)), "constant"};
}

ProfileReport brunn_profile(const BrunnOracle& varphi, double alpha,
                            const std::vector<double>& t_grid)
{
    const std::size_t n = varphi.dim;
    if (n != 1 && n != 2)
        throw std::invalid_argument("brunn_profile: n must be 1 or 2");
    if (!(alpha > 0.0))
        throw std::invalid_argument("brunn_profile: alpha must be positive");
    if (t_grid.size() < 3 || !std::is_sorted(t_grid.begin(), t_grid.end()))
        throw std::invalid_argument("brunn_profile: t grid must be sorted with at least 3 points");

    const double power = -(static_cast<double>(n) + alpha);
    const double X = varphi.x_radius;
    QuadOptions inner;
    inner.rel_tol = 1e-11;
    inner.abs_tol = 1e-18;
    QuadOptions outer;
    outer.rel_tol = 1e-10;
    outer.abs_tol = 1e-17;

    ProfileReport rep;
    rep.t = t_grid;
    rep.direction = {1.0};
    rep.method = "quadrature";
    rep.std_error.assign(t_grid.size(), 0.0);
    Vector x(static_cast<Eigen::Index>(n));
    for (double t : t_grid)
    {
        auto weight = [&](const Vector& pt) {
            const double v = varphi.phi(t, pt);
            if (std::isinf(v))
                return 0.0;
            if (!(v > 0.0))
                throw std::invalid_argument("brunn_profile: phi must be positive");
            return std::pow(v, power);
        };
        double integral;
        if (n == 1)
        {
            auto f = [&](double a) {
                x(0) = a;
                return weight(x);
            };
            integral = integrate_interval_or_line(f, -X, X, outer);
        }
        else
        {
            auto row = [&](double a) {
                auto col = [&](double b) {
                    x(0) = a;
                    x(1) = b;
                    return weight(x);
                };
                return integrate_interval_or_line(col, -X, X, inner);
            };
            integral = integrate_interval_or_line(row, -X, X, outer);
        }
        if (!(integral > 0.0) || !std::isfinite(integral))
            throw NumericalError("brunn_profile: integral is zero or divergent at t = "
                                 + std::to_string(t));
        rep.value.push_back(std::pow(integral, -1.0 / alpha));
    }
    double top = 1.0;
    for (double v : rep.value)
        top = std::max(top, std::abs(v));
    rep.tolerance = 1e-6 * top;
    rep.verdict = convexity_even_check(rep, rep.tolerance);
    return rep;
}

//---------------------------------------------------------------------------//
// Rearrangement inequality on the line
//---------------------------------------------------------------------------//

StepFn1d::StepFn1d(std::vector<Piece> pieces) : pieces_(std::move(pieces))
{
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < pieces_.size(); ++i)
    {
        const Piece& p = pieces_[i];
        if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !(p.lo < p.hi))
            throw std::invalid_argument("step pieces need finite lo < hi");
        if (!(p.value >= 0.0) || !std::isfinite(p.value))
            throw std::invalid_argument("step values must be finite and nonnegative");
        if (i > 0 && pieces_[i - 1].hi > p.lo)
            throw std::invalid_argument("step pieces must not overlap");
    }
}

StepFn1d StepFn1d::indicator(double lo, double hi)
{
    return StepFn1d({{lo, hi, 1.0}});
}

double StepFn1d::operator()(double s) const
{
    for (const Piece& p : pieces_)
        if (s >= p.lo && s < p.hi)
            return p.value;
    return 0.0;
}

double StepFn1d::integral() const
{
    double total = 0.0;
    for (const Piece& p : pieces_)
        total += p.value * (p.hi - p.lo);
    return total;
}

bool StepFn1d::symmetric_decreasing() const
{
    std::vector<double> cuts{0.0};
    for (const Piece& p : pieces_)
        if (p.value > 0.0)
            for (double e : {p.lo, p.hi})
            {
                cuts.push_back(std::abs(e));
                cuts.push_back(-std::abs(e));
            }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    // Cell values at midpoints must mirror and decrease away from 0.
    double prev_pos = kInf;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        if (mid <= 0.0)
            continue;
        const double here = (*this)(mid);
        if (here != (*this)(-mid) || here > prev_pos)
            return false;
        prev_pos = here;
    }
    return true;
}

StepFn1d rearrange_1d(const StepFn1d& g)
{
    if (g.symmetric_decreasing())
        return g;
    std::vector<std::pair<double, double>> levels;  // (value, total length)
    for (const auto& p : g.pieces())
    {
        if (p.value <= 0.0)
            continue;
        auto it = std::find_if(levels.begin(), levels.end(),
                               [&](const auto& l) { return l.first == p.value; });
        if (it == levels.end())
            levels.emplace_back(p.value, p.hi - p.lo);
        else
            it->second += p.hi - p.lo;
    }
    std::sort(levels.begin(), levels.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<StepFn1d::Piece> out;
    double inner = 0.0;
    for (const auto& [value, length] : levels)
    {
        const double outer = inner + 0.5 * length;
        if (inner == 0.0)
            out.push_back({-outer, outer, value});
        else
        {
            out.push_back({-outer, -inner, value});
            out.push_back({inner, outer, value});
        }
        inner = outer;
    }
    return StepFn1d(std::move(out));
}

namespace
{
double rbll_integral(const std::vector<StepFn1d>& g, const Matrix& c, double half_width)
{
    const std::size_t k = g.size();
    const auto N = static_cast<std::size_t>(c.cols());
    double factor = 1.0;
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < k; ++i)
    {
        if (c.row(static_cast<Eigen::Index>(i)).isZero(0.0))
            factor *= g[i](0.0);
        else
            active.push_back(i);
    }
    if (factor == 0.0)
        return 0.0;

    std::vector<Halfspace> hs;
    double total = 0.0;
    // Expand the product over one piece per active function.
    auto recurse = [&](auto&& self, std::size_t depth, double weight) -> void {
        if (depth == active.size())
        {
            total += weight * box_intersection_volume(hs, N, half_width);
            return;
        }
        const std::size_t i = active[depth];
        const Vector row = c.row(static_cast<Eigen::Index>(i)).transpose();
        for (const auto& piece : g[i].pieces())
        {
            if (piece.value == 0.0)
                continue;
            hs.push_back({row, piece.hi});
            hs.push_back({-row, -piece.lo});
            self(self, depth + 1, weight * piece.value);
            hs.pop_back();
            hs.pop_back();
        }
    };
    recurse(recurse, 0, factor);
    return total;
}
}  // namespace

RbllResult rbll_check_1d(const std::vector<StepFn1d>& g, const Matrix& coeffs, double half_width)
{
    if (g.empty() || g.size() > 3)
        throw std::invalid_argument("rbll_check_1d: need 1 to 3 functions");
    if (static_cast<std::size_t>(coeffs.rows()) != g.size() || coeffs.cols() < 1 || coeffs.cols() > 3)
        throw std::invalid_argument("rbll_check_1d: coefficients must be k x N with N in 1..3");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw std::invalid_argument("rbll_check_1d: box half-width must be positive and finite");
    std::vector<StepFn1d> star;
    star.reserve(g.size());
    for (const StepFn1d& f : g)
        star.push_back(rearrange_1d(f));
    return {rbll_integral(g, coeffs, half_width), rbll_integral(star, coeffs, half_width)};
}

std::vector<RbllCase> rbll_exhaustive_family()
{
    // Relabeling the s_j or flipping the sign of one s_j leaves both sides
    // unchanged (the box is symmetric), so coefficient columns are taken up
    // to sign (first nonzero entry positive) and as sorted multisets.
    const std::vector<double> offsets{-0.5, 0.0, 1.0};
    std::vector<RbllCase> cases;
    for (std::size_t k = 1; k <= 3; ++k)
    {
        std::vector<Vector> columns;
        const std::size_t total = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(k)));
        for (std::size_t code = 0; code < total; ++code)
        {
            Vector col(static_cast<Eigen::Index>(k));
            std::size_t rest = code;
            for (std::size_t i = 0; i < k; ++i)
            {
                col(static_cast<Eigen::Index>(i)) = static_cast<double>(rest % 3) - 1.0;
                rest /= 3;
            }
            double lead = 0.0;
            for (Eigen::Index i = 0; i < col.size() && lead == 0.0; ++i)
                lead = col(i);
            if (lead >= 0.0)
                columns.push_back(col);
        }
        const std::size_t m = columns.size();

        std::vector<std::vector<StepFn1d>> placements;
        const std::size_t pcount = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(k)));
        for (std::size_t code = 0; code < pcount; ++code)
        {
            std::vector<StepFn1d> g;
            std::size_t rest = code;
            for (std::size_t i = 0; i < k; ++i)
            {
                const double o = offsets[rest % 3];
                rest /= 3;
                g.push_back(StepFn1d::indicator(o, o + 1.0));
            }
            placements.push_back(std::move(g));
        }

        for (std::size_t N = 1; N <= 3; ++N)
        {
            std::vector<std::size_t> pick(N, 0);
            while (true)
            {
                Matrix c(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(N));
                for (std::size_t j = 0; j < N; ++j)
                    c.col(static_cast<Eigen::Index>(j)) = columns[pick[j]];
                for (const auto& g : placements)
                    cases.push_back({g, c, 3.0});
                // Next nondecreasing index tuple.
                std::size_t pos = N;
                while (pos > 0 && pick[pos - 1] == m - 1)
                    --pos;
                if (pos == 0)
                    break;
                ++pick[pos - 1];
                for (std::size_t j = pos; j < N; ++j)
                    pick[j] = pick[pos - 1];
            }
        }
    }
    return cases;
}

RbllSummary rbll_check_family(const std::vector<RbllCase>& cases, double tol, unsigned threads)
{
    std::vector<RbllResult> results(cases.size());
    parallel_for(cases.size(), threads, [&](std::size_t i) {
        results[i] = rbll_check_1d(cases[i].g, cases[i].coeffs, cases[i].half_width);
    });
    RbllSummary s;
    s.cases = cases.size();
    for (std::size_t i = 0; i < cases.size(); ++i)
    {
        const double gap = results[i].lhs - results[i].rhs;
        s.worst_gap = std::max(s.worst_gap, gap);
        if (gap > tol)
            ++s.violations;
        const bool symmetric = std::all_of(cases[i].g.begin(), cases[i].g.end(),
                                           [](const StepFn1d& f) { return f.symmetric_decreasing(); });
        if (symmetric)
        {
            ++s.symmetric_cases;
            if (results[i].lhs != results[i].rhs)
                ++s.symmetric_inequalities;
        }
    }
    s.results = std::move(results);
    return s;
}

}  // namespace randpolar
