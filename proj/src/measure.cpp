#include "randpolar/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "randpolar/error.hpp"
#include "randpolar/polytope.hpp"
#include "randpolar/quadrature.hpp"

namespace randpolar
{

namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kTableSize = 4096;
constexpr std::size_t kRejectionCap = 1'000'000;

double sphere_area(std::size_t n)
{
    return static_cast<double>(n) * unit_ball_volume(n);
}

double ipow(double x, std::size_t n)
{
    return std::pow(x, static_cast<double>(n));
}
}  // namespace

//---------------------------------------------------------------------------//
// RadialStepFn
//---------------------------------------------------------------------------//

RadialStepFn::RadialStepFn(std::size_t dim, std::vector<double> breaks, std::vector<double> values)
    : dim_(dim), breaks_(std::move(breaks)), values_(std::move(values))
{
    if (dim_ == 0)
        throw std::invalid_argument("radial step dimension must be >= 1");
    if (breaks_.size() != values_.size())
        throw std::invalid_argument("radial step needs one value per break");
    double prev = 0.0;
    for (double b : breaks_)
    {
        if (!(b > prev) || !std::isfinite(b))
            throw std::invalid_argument("radial step breaks must be finite and strictly increasing from 0");
        prev = b;
    }
    for (double v : values_)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("radial step values must be finite and nonnegative");
}

double RadialStepFn::operator()(double radius) const
{
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), radius);
    if (it == breaks_.end())
        return 0.0;
    return values_[static_cast<std::size_t>(it - breaks_.begin())];
}

double RadialStepFn::piece_volume(std::size_t j) const
{
    const double inner = (j == 0) ? 0.0 : breaks_[j - 1];
    return unit_ball_volume(dim_) * (ipow(breaks_[j], dim_) - ipow(inner, dim_));
}

double RadialStepFn::level_volume(double alpha) const
{
    double v = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j)
        if (values_[j] > alpha)
            v += piece_volume(j);
    return v;
}

double RadialStepFn::integral() const
{
    double s = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j)
        s += values_[j] * piece_volume(j);
    return s;
}

double RadialStepFn::lp_norm(double p) const
{
    if (p == kInf)
        return sup();
    double s = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j)
        s += std::pow(values_[j], p) * piece_volume(j);
    return std::pow(s, 1.0 / p);
}

double RadialStepFn::sup() const
{
    double m = 0.0;
    for (double v : values_)
        m = std::max(m, v);
    return m;
}

double RadialStepFn::support_radius() const
{
    for (std::size_t j = values_.size(); j-- > 0;)
        if (values_[j] > 0.0)
            return breaks_[j];
    return 0.0;
}

bool RadialStepFn::decreasing() const
{
    return std::is_sorted(values_.rbegin(), values_.rend());
}

RadialStepFn rearrange_density(const RadialStepFn& f)
{
    const std::size_t n = f.dim();
    if (f.decreasing())
    {
        // Already symmetric decreasing: canonicalize without touching radii.
        std::vector<double> breaks, values;
        for (std::size_t j = 0; j < f.values().size(); ++j)
        {
            const double v = f.values()[j];
            if (v == 0.0)
                break;
            if (!values.empty() && values.back() == v)
                breaks.back() = f.breaks()[j];
            else
            {
                breaks.push_back(f.breaks()[j]);
                values.push_back(v);
            }
        }
        return RadialStepFn(n, std::move(breaks), std::move(values));
    }

    std::vector<std::pair<double, double>> pieces;  // (value, volume)
    for (std::size_t j = 0; j < f.values().size(); ++j)
        if (f.values()[j] > 0.0)
            pieces.emplace_back(f.values()[j], f.piece_volume(j));
    std::stable_sort(pieces.begin(), pieces.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    const double omega = unit_ball_volume(n);
    std::vector<double> breaks, values;
    double cumulative = 0.0;
    for (const auto& [value, volume] : pieces)
    {
        cumulative += volume;
        const double radius = std::pow(cumulative / omega, 1.0 / static_cast<double>(n));
        if (!values.empty() && values.back() == value)
            breaks.back() = radius;
        else
        {
            breaks.push_back(radius);
            values.push_back(value);
        }
    }
    return RadialStepFn(n, std::move(breaks), std::move(values));
}

RadialStepFn rearrange_density(const PnDensity& f)
{
    if (const RadialStepFn* r = f.radial())
        return rearrange_density(*r);
    // Uniform on a unit-volume body: its only level set becomes D_n.
    return RadialStepFn(f.dim(), {unit_volume_ball_radius(f.dim())}, {1.0});
}

//---------------------------------------------------------------------------//
// RadialMeasure
//---------------------------------------------------------------------------//

RadialMeasure RadialMeasure::lebesgue(std::size_t n, double radius)
{
    if (n == 0)
        throw std::invalid_argument("measure dimension must be >= 1");
    if (!(radius > 0.0))
        throw std::invalid_argument("Lebesgue ball radius must be positive (or +inf)");
    return RadialMeasure(n, LebesgueBall{radius});
}

RadialMeasure RadialMeasure::gaussian(std::size_t n, double sigma)
{
    if (n == 0)
        throw std::invalid_argument("measure dimension must be >= 1");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("sigma must be positive and finite");
    return RadialMeasure(n, Gaussian{sigma});
}

RadialMeasure RadialMeasure::power_kernel(std::size_t n, std::vector<double> t, std::vector<double> k)
{
    if (n == 0)
        throw std::invalid_argument("measure dimension must be >= 1");
    if (t.empty() || t.size() != k.size())
        throw std::invalid_argument("k table needs matching, nonempty t and k columns");
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        if (!(t[i] >= 0.0) || !std::isfinite(t[i]) || (i > 0 && !(t[i] > t[i - 1])))
            throw std::invalid_argument("k table abscissae must be >= 0 and strictly increasing");
        if (!(k[i] > 0.0) || !std::isfinite(k[i]))
            throw std::invalid_argument("k table values must be positive and finite");
        if (i > 0 && k[i] < k[i - 1])
            throw std::invalid_argument("k must be increasing so that rho is decreasing");
    }
    return RadialMeasure(n, PowerKernel{std::move(t), std::move(k)});
}

double RadialMeasure::kernel(double t) const
{
    const auto& pk = std::get<PowerKernel>(kind_);
    const auto& ts = pk.t;
    const auto& ks = pk.k;
    if (t <= ts.front() || ts.size() == 1)
    {
        if (ts.size() == 1 || t <= ts.front())
            return ks.front();
    }
    if (t >= ts.back())
    {
        const std::size_t m = ts.size();
        const double slope = (ks[m - 1] - ks[m - 2]) / (ts[m - 1] - ts[m - 2]);
        return ks.back() + slope * (t - ts.back());
    }
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const auto i = static_cast<std::size_t>(it - ts.begin());
    const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    return ks[i - 1] + w * (ks[i] - ks[i - 1]);
}

double RadialMeasure::rho(double t) const
{
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, LebesgueBall>)
                return t <= k.radius ? 1.0 : 0.0;
            else if constexpr (std::is_same_v<T, Gaussian>)
                return std::exp(-t * t / (2.0 * k.sigma * k.sigma));
            else
                return std::pow(kernel(t), -static_cast<double>(dim_ + 1));
        },
        kind_);
}

bool RadialMeasure::finite_mass() const
{
    if (const auto* l = std::get_if<LebesgueBall>(&kind_))
        return std::isfinite(l->radius);
    if (std::holds_alternative<Gaussian>(kind_))
        return true;
    const auto& pk = std::get<PowerKernel>(kind_);
    if (pk.t.size() < 2)
        return false;
    const std::size_t m = pk.t.size();
    return pk.k[m - 1] > pk.k[m - 2];
}

double RadialMeasure::total_mass() const
{
    if (!finite_mass())
        return kInf;
    if (const auto* g = std::get_if<Gaussian>(&kind_))
        return std::pow(2.0 * std::numbers::pi * g->sigma * g->sigma, 0.5 * static_cast<double>(dim_));
    return mass_within(kInf);
}

double RadialMeasure::mass_within(double radius) const
{
    if (!(radius > 0.0))
        return 0.0;
    const std::size_t n = dim_;
    auto radial = [&](double t) { return rho(t) * ipow(t, n - 1); };
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-300;

    if (const auto* l = std::get_if<LebesgueBall>(&kind_))
        return unit_ball_volume(n) * ipow(std::min(radius, l->radius), n);
    if (const auto* g = std::get_if<Gaussian>(&kind_))
    {
        if (n == 2)
            return 2.0 * std::numbers::pi * g->sigma * g->sigma
                   * -std::expm1(-radius * radius / (2.0 * g->sigma * g->sigma));
        if (std::isinf(radius) || radius > 40.0 * g->sigma)
        {
            if (std::isinf(radius))
                return total_mass();
            radius = 40.0 * g->sigma;
        }
        return sphere_area(n) * integrate(radial, 0.0, radius, opt);
    }

    const auto& pk = std::get<PowerKernel>(kind_);
    if (std::isinf(radius) && !finite_mass())
        return kInf;
    double sum = 0.0;
    double lo = 0.0;
    for (double knot : pk.t)
    {
        if (knot <= lo)
            continue;
        const double hi = std::min(knot, radius);
        sum += integrate(radial, lo, hi, opt);
        lo = hi;
        if (lo >= radius)
            break;
    }
    if (radius > lo)
        sum += integrate_range(radial, lo, radius, opt);
    return sphere_area(n) * sum;
}

double RadialMeasure::level_radius(double level) const
{
    if (level <= 0.0)
        return support_radius();
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, LebesgueBall>)
                return level <= 1.0 ? k.radius : 0.0;
            else if constexpr (std::is_same_v<T, Gaussian>)
                return level >= 1.0 ? 0.0 : k.sigma * std::sqrt(2.0 * std::log(1.0 / level));
            else
            {
                // sup{s : k(s) <= K} for the increasing piecewise-linear k.
                const double cap = std::pow(level, -1.0 / static_cast<double>(dim_ + 1));
                const auto& ts = k.t;
                const auto& ks = k.k;
                if (ks.front() > cap)
                    return 0.0;
                for (std::size_t i = 1; i < ts.size(); ++i)
                    if (ks[i] > cap)
                        return ts[i - 1] + (cap - ks[i - 1]) * (ts[i] - ts[i - 1]) / (ks[i] - ks[i - 1]);
                if (ts.size() == 1)
                    return kInf;
                const std::size_t m = ts.size();
                const double slope = (ks[m - 1] - ks[m - 2]) / (ts[m - 1] - ts[m - 2]);
                if (slope <= 0.0)
                    return kInf;
                return ts.back() + (cap - ks.back()) / slope;
            }
        },
        kind_);
}

double RadialMeasure::support_radius() const
{
    if (const auto* l = std::get_if<LebesgueBall>(&kind_))
        return l->radius;
    return kInf;
}

std::string RadialMeasure::describe() const
{
    std::ostringstream os;
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, LebesgueBall>)
                os << "lebesgue_ball(R=" << k.radius << ")";
            else if constexpr (std::is_same_v<T, Gaussian>)
                os << "gaussian(sigma=" << k.sigma << ")";
            else
                os << "power_kernel(" << k.t.size() << " knots)";
        },
        kind_);
    os << " in R^" << dim_;
    return os.str();
}

double rho_eval(const RadialMeasure& m, double t)
{
    if (!(t >= 0.0))
        throw std::invalid_argument("rho_eval: t must be >= 0");
    return m.rho(t);
}

namespace
{
Condnu2Check check_kernel(const std::vector<double>& grid, const std::vector<double>& rho,
                          const std::vector<double>& kern)
{
    Condnu2Check c;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (rho[i + 1] > rho[i])
            c.decreasing = false;
    bool convex = true;
    for (std::size_t i = 0; i + 2 < grid.size(); ++i)
    {
        const double a = kern[i], m = kern[i + 1], b = kern[i + 2];
        if (std::isinf(a) || std::isinf(b))
            continue;
        if (std::isinf(m))
        {
            convex = false;
            continue;
        }
        const double w = (grid[i + 1] - grid[i]) / (grid[i + 2] - grid[i]);
        const double chord = a + w * (b - a);
        if (m > chord + 1e-10 * std::max(1.0, std::abs(chord)))
            convex = false;
    }
    c.condnu2 = c.decreasing && convex;
    return c;
}

void require_grid(const std::vector<double>& grid)
{
    if (grid.size() < 3)
        throw std::invalid_argument("check_condnu2 needs at least 3 grid points");
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!(grid[i] >= 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
            throw std::invalid_argument("check_condnu2 grid must be nonnegative and increasing");
}
}  // namespace

Condnu2Check check_condnu2(const std::function<double(double)>& rho, std::size_t n,
                           const std::vector<double>& grid)
{
    require_grid(grid);
    std::vector<double> r(grid.size()), k(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        r[i] = rho(grid[i]);
        k[i] = r[i] > 0.0 ? std::pow(r[i], -1.0 / static_cast<double>(n + 1)) : kInf;
    }
    return check_kernel(grid, r, k);
}

Condnu2Check check_condnu2(const RadialMeasure& m, const std::vector<double>& grid)
{
    require_grid(grid);
    const auto n1 = static_cast<double>(m.dim() + 1);
    std::vector<double> r(grid.size()), k(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        const double t = grid[i];
        r[i] = m.rho(t);
        // Evaluate rho^{-1/(n+1)} in closed form to avoid underflow in rho.
        k[i] = std::visit(
            [&](const auto& kind) -> double {
                using T = std::decay_t<decltype(kind)>;
                if constexpr (std::is_same_v<T, RadialMeasure::LebesgueBall>)
                    return t <= kind.radius ? 1.0 : kInf;
                else if constexpr (std::is_same_v<T, RadialMeasure::Gaussian>)
                    return std::exp(t * t / (2.0 * kind.sigma * kind.sigma * n1));
                else
                    return std::pow(r[i], -1.0 / n1);
            },
            m.kind());
    }
    return check_kernel(grid, r, k);
}

//---------------------------------------------------------------------------//
// PnDensity
//---------------------------------------------------------------------------//

namespace
{
double simplex_scale(std::size_t n)
{
    return std::pow(std::tgamma(static_cast<double>(n) + 1.0), 1.0 / static_cast<double>(n));
}
}  // namespace

PnDensity PnDensity::uniform_cube(std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("density dimension must be >= 1");
    PnDensity d(n);
    d.shape_ = Shape::cube;
    return d;
}

PnDensity PnDensity::uniform_Dn(std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("density dimension must be >= 1");
    PnDensity d(n);
    d.shape_ = Shape::ball;
    return d;
}

PnDensity PnDensity::uniform_simplex(std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("density dimension must be >= 1");
    PnDensity d(n);
    d.shape_ = Shape::simplex;
    return d;
}

PnDensity PnDensity::radial_step(RadialStepFn f)
{
    if (f.sup() > 1.0)
        throw std::invalid_argument("density values must be <= 1");
    if (std::abs(f.integral() - 1.0) > 1e-9)
        throw std::invalid_argument("density must integrate to 1 (got "
                                    + std::to_string(f.integral()) + ")");
    PnDensity d(f.dim());
    d.radial_ = std::move(f);
    return d;
}

std::string PnDensity::kind_name() const
{
    if (radial_)
        return "radial_step";
    switch (*shape_)
    {
    case Shape::cube: return "uniform_cube";
    case Shape::ball: return "uniform_Dn";
    case Shape::simplex: return "uniform_simplex";
    }
    return "unknown";
}

double PnDensity::eval(const Vector& x) const
{
    if (static_cast<std::size_t>(x.size()) != dim_)
        throw std::invalid_argument("density: dimension mismatch");
    if (radial_)
        return (*radial_)(x.norm());
    switch (*shape_)
    {
    case Shape::cube:
        return x.cwiseAbs().maxCoeff() <= 0.5 ? 1.0 : 0.0;
    case Shape::ball:
        return x.norm() <= unit_volume_ball_radius(dim_) ? 1.0 : 0.0;
    case Shape::simplex: {
        const double s = simplex_scale(dim_);
        const double c = 1.0 / static_cast<double>(dim_ + 1);
        double total = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i)
        {
            const double u = x(i) / s + c;
            if (u < 0.0)
                return 0.0;
            total += u;
        }
        return total <= 1.0 ? 1.0 : 0.0;
    }
    }
    return 0.0;
}

double PnDensity::integral() const
{
    return radial_ ? radial_->integral() : 1.0;
}

double PnDensity::sup() const
{
    return radial_ ? radial_->sup() : 1.0;
}

double PnDensity::support_radius() const
{
    if (radial_)
        return radial_->support_radius();
    const double n = static_cast<double>(dim_);
    switch (*shape_)
    {
    case Shape::cube: return 0.5 * std::sqrt(n);
    case Shape::ball: return unit_volume_ball_radius(dim_);
    case Shape::simplex: {
        const double c = 1.0 / (n + 1.0);
        const double to_origin = std::sqrt(n) * c;
        const double to_axis = std::sqrt((1.0 - c) * (1.0 - c) + (n - 1.0) * c * c);
        return simplex_scale(dim_) * std::max(to_origin, to_axis);
    }
    }
    return 0.0;
}

//---------------------------------------------------------------------------//
// Samplers
//---------------------------------------------------------------------------//

void sample_direction_into(RandomEngine& eng, Vector& out)
{
    const Eigen::Index n = out.size();
    if (n == 1)
    {
        out(0) = eng.uniform() < 0.5 ? -1.0 : 1.0;
        return;
    }
    if (n == 2)
    {
        const double phi = 2.0 * std::numbers::pi * eng.uniform();
        out(0) = std::cos(phi);
        out(1) = std::sin(phi);
        return;
    }
    double len = 0.0;
    do
    {
        for (Eigen::Index i = 0; i < n; ++i)
            out(i) = eng.normal();
        len = out.norm();
    } while (len < 1e-300);
    out /= len;
}

void sample_uniform_ball_into(double radius, RandomEngine& eng, Vector& out)
{
    const auto n = static_cast<std::size_t>(out.size());
    if (n == 1)
    {
        out(0) = radius * (2.0 * eng.uniform() - 1.0);
        return;
    }
    sample_direction_into(eng, out);
    const double u = eng.uniform();
    const double r = (n == 2) ? std::sqrt(u) : std::pow(u, 1.0 / static_cast<double>(n));
    out *= radius * r;
}

Vector sample_uniform_ball(std::size_t n, double radius, RandomEngine& eng)
{
    if (n == 0 || !(radius > 0.0))
        throw std::invalid_argument("sample_uniform_ball needs n >= 1 and radius > 0");
    Vector out(static_cast<Eigen::Index>(n));
    sample_uniform_ball_into(radius, eng, out);
    return out;
}

void sample_density_into(const PnDensity& f, RandomEngine& eng, Vector& out)
{
    const auto n = static_cast<Eigen::Index>(f.dim());
    if (out.size() != n)
        out.resize(n);
    if (const RadialStepFn* r = f.radial())
    {
        const double rmax = r->support_radius();
        for (std::size_t attempt = 0; attempt < kRejectionCap; ++attempt)
        {
            sample_uniform_ball_into(rmax, eng, out);
            if (eng.uniform() < (*r)(out.norm()))
                return;
        }
        throw NumericalError("rejection sampler exceeded 10^6 attempts; density mis-specified?");
    }
    switch (*f.shape())
    {
    case PnDensity::Shape::cube:
        for (Eigen::Index i = 0; i < n; ++i)
            out(i) = eng.uniform() - 0.5;
        return;
    case PnDensity::Shape::ball:
        sample_uniform_ball_into(unit_volume_ball_radius(f.dim()), eng, out);
        return;
    case PnDensity::Shape::simplex: {
        // Uniform on the standard simplex via normalized exponential spacings.
        double total = -std::log(eng.uniform_pos());
        for (Eigen::Index i = 0; i < n; ++i)
        {
            out(i) = -std::log(eng.uniform_pos());
            total += out(i);
        }
        const double s = simplex_scale(f.dim());
        const double c = 1.0 / static_cast<double>(f.dim() + 1);
        for (Eigen::Index i = 0; i < n; ++i)
            out(i) = s * (out(i) / total - c);
        return;
    }
    }
}

Vector sample_density(const PnDensity& f, RandomEngine& eng)
{
    Vector out(static_cast<Eigen::Index>(f.dim()));
    sample_density_into(f, eng, out);
    return out;
}

RadialMeasureSampler::RadialMeasureSampler(const RadialMeasure& m)
    : dim_(m.dim()), total_mass_(m.total_mass())
{
    if (!m.finite_mass())
        throw InfeasibleError("cannot sample a measure of infinite total mass ("
                              + m.describe() + ")");
    if (const auto* l = std::get_if<RadialMeasure::LebesgueBall>(&m.kind()))
    {
        lebesgue_radius_ = l->radius;
        return;
    }

    const std::size_t n = dim_;
    double t_hi;
    if (const auto* g = std::get_if<RadialMeasure::Gaussian>(&m.kind()))
        t_hi = 12.0 * g->sigma;
    else
    {
        const auto& pk = std::get<RadialMeasure::PowerKernel>(m.kind());
        t_hi = std::max(pk.t.back(), 1.0);
        for (int i = 0; i < 60; ++i)
        {
            const double inside = m.mass_within(t_hi);
            if (total_mass_ - inside <= 1e-10 * total_mass_)
                break;
            t_hi *= 2.0;
        }
    }
    const double t_lo = t_hi * 1e-8;
    auto radial = [&](double t) { return m.rho(t) * ipow(t, n - 1); };

    t_.resize(kTableSize + 1);
    cdf_.resize(kTableSize + 1);
    t_[0] = 0.0;
    cdf_[0] = 0.0;
    const double ratio = std::log(t_hi / t_lo);
    for (std::size_t i = 1; i <= kTableSize; ++i)
    {
        t_[i] = t_lo * std::exp(ratio * static_cast<double>(i - 1) / static_cast<double>(kTableSize - 1));
        // Composite Simpson with four panels per table cell.
        const double a = t_[i - 1], b = t_[i];
        const double h = (b - a) / 4.0;
        const double piece = h / 3.0
                             * (radial(a) + 4.0 * radial(a + h) + 2.0 * radial(a + 2 * h)
                                + 4.0 * radial(a + 3 * h) + radial(b));
        cdf_[i] = cdf_[i - 1] + piece;
    }
}

double RadialMeasureSampler::sample_radius(RandomEngine& eng) const
{
    if (lebesgue_radius_ > 0.0)
    {
        const double u = eng.uniform();
        return lebesgue_radius_ * (dim_ == 2 ? std::sqrt(u) : std::pow(u, 1.0 / static_cast<double>(dim_)));
    }
    const double target = eng.uniform() * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
    if (it == cdf_.end())
        return t_.back();
    const auto i = static_cast<std::size_t>(it - cdf_.begin());
    const double span = cdf_[i] - cdf_[i - 1];
    const double w = span > 0.0 ? (target - cdf_[i - 1]) / span : 0.0;
    return t_[i - 1] + w * (t_[i] - t_[i - 1]);
}

void RadialMeasureSampler::sample_into(RandomEngine& eng, Vector& out) const
{
    if (static_cast<std::size_t>(out.size()) != dim_)
        out.resize(static_cast<Eigen::Index>(dim_));
    sample_direction_into(eng, out);
    out *= sample_radius(eng);
}

std::pair<Vector, double> sample_radial_measure(const RadialMeasure& m, RandomEngine& eng)
{
    RadialMeasureSampler sampler(m);
    Vector out(static_cast<Eigen::Index>(m.dim()));
    sampler.sample_into(eng, out);
    return {std::move(out), sampler.total_mass()};
}

//---------------------------------------------------------------------------//
// Density oracles and hyperplane measure
//---------------------------------------------------------------------------//

DensityOracle DensityOracle::gaussian_factor(std::size_t n, double sigma)
{
    return {n, [sigma](const Vector& x) { return std::exp(-x.squaredNorm() / (2.0 * sigma * sigma)); },
            kInf, "gaussian_factor"};
}

DensityOracle DensityOracle::cube_indicator(std::size_t n, double half_width)
{
    return {n,
            [half_width](const Vector& x) {
                return x.cwiseAbs().maxCoeff() <= half_width ? 1.0 : 0.0;
            },
            half_width * std::sqrt(static_cast<double>(n)), "cube_indicator"};
}

DensityOracle DensityOracle::ball_indicator(std::size_t n, double radius)
{
    return {n, [radius](const Vector& x) { return x.norm() <= radius ? 1.0 : 0.0; }, radius,
            "ball_indicator"};
}

double nu_plus_hyperplane(const DensityOracle& psi, const Vector& z)
{
    const std::size_t n = psi.dim;
    if (static_cast<std::size_t>(z.size()) != n)
        throw std::invalid_argument("nu_plus_hyperplane: dimension mismatch");
    if (n != 2 && n != 3)
        throw std::invalid_argument("nu_plus_hyperplane: only n = 2 or 3 is supported");
    const double zn = z.norm();
    if (!(zn > 0.0))
        throw std::invalid_argument("nu_plus_hyperplane: z must be nonzero");
    const double S = psi.support_radius;

    if (n == 2)
    {
        Vector u(2);
        u << -z(1) / zn, z(0) / zn;
        Vector x(2);
        auto line = [&](double s) {
            x = s * u;
            return psi.eval(x);
        };
        QuadOptions opt;
        opt.rel_tol = 1e-9;
        return integrate_range(line, std::isinf(S) ? -kInf : -S, std::isinf(S) ? kInf : S, opt);
    }

    // Orthonormal basis of z^perp.
    const Vec3 zz(z(0) / zn, z(1) / zn, z(2) / zn);
    const Vec3 helper = std::abs(zz.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 u = zz.cross(helper).normalized();
    const Vec3 v = zz.cross(u);
    Vector x(3);
    QuadOptions inner;
    inner.rel_tol = 1e-9;
    inner.abs_tol = 1e-15;
    inner.min_depth = 5;
    QuadOptions outer;
    outer.rel_tol = 1e-8;
    outer.min_depth = 5;
    auto row = [&](double a) {
        auto col = [&](double b) {
            const Vec3 p = a * u + b * v;
            x << p.x(), p.y(), p.z();
            return psi.eval(x);
        };
        if (std::isinf(S))
            return integrate_real_line(col, inner);
        const double half = std::sqrt(std::max(0.0, S * S - a * a));
        if (half == 0.0)
            return 0.0;
        return integrate(col, -half, half, inner);
    };
    return integrate_range(row, std::isinf(S) ? -kInf : -S, std::isinf(S) ? kInf : S, outer);
}

}  // namespace randpolar
