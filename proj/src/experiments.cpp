#include "randpolar/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
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

struct Moments
{
    double mean = 0.0;
    double std_error = 0.0;
};

Moments moments(const std::vector<double>& v)
{
    RunningStats s;
    for (double x : v)
        s.add(x);
    return {s.mean(), s.std_error()};
}

std::vector<TrialRow> side_rows(const SideValues& s, const std::string& side)
{
    std::vector<TrialRow> rows;
    for (std::size_t i = 0; i < s.value.size(); ++i)
        rows.push_back({i, side, s.value[i], s.std_error[i]});
    return rows;
}

Json side_json(const Moments& m)
{
    return {{"mean", m.mean}, {"stderr", m.std_error}};
}

// Exact nu of the polar of conv{±z_1, ..., ±z_N}, maintained under
// appending points by clipping one region in place.
class IncrementalPolar
{
  public:
    IncrementalPolar(std::size_t n, double radius, double half_width)
        : n_(n), radius_(radius), half_width_(half_width)
    {
        if (n_ == 1)
            reach_ = std::min(half_width, radius);
        else if (n_ == 2)
            poly_ = clip_square({}, half_width);
        else
            poly3_ = Polyhedron::cube(half_width);
    }

    void add(const Vector& z)
    {
        if (n_ == 1)
        {
            if (z(0) != 0.0)
                reach_ = std::min(reach_, 1.0 / std::abs(z(0)));
        }
        else if (n_ == 2)
        {
            const Vec2 a(z(0), z(1));
            poly_ = clip_polygon(poly_, a, 1.0);
            poly_ = clip_polygon(poly_, -a, 1.0);
        }
        else
        {
            const Vec3 a(z(0), z(1), z(2));
            poly3_.clip(a, 1.0);
            poly3_.clip(-a, 1.0);
        }
    }

    double value() const
    {
        if (n_ == 1)
            return 2.0 * reach_;
        if (n_ == 2)
            return std::isinf(radius_) ? polygon_area(poly_) : polygon_disk_area(poly_, radius_);
        return poly3_.volume();
    }

  private:
    std::size_t n_;
    double radius_;
    double half_width_;
    double reach_ = 0.0;
    std::vector<Vec2> poly_;
    Polyhedron poly3_ = Polyhedron::cube(1.0);
};

// |S^{n-1}|-integral of |theta_1|^p.
double sphere_abs_moment(std::size_t n, double p)
{
    const double dn = static_cast<double>(n);
    return 2.0 * std::pow(std::numbers::pi, 0.5 * (dn - 1.0)) * std::tgamma(0.5 * (p + 1.0))
           / std::tgamma(0.5 * (dn + p));
}

// integral over [lo, hi] of |a + theta x|^p dx.
double abs_pow_integral(double a, double theta, double lo, double hi, double p)
{
    if (theta == 0.0)
        return std::pow(std::abs(a), p) * (hi - lo);
    auto F = [p](double u) { return std::copysign(std::pow(std::abs(u), p + 1.0), u) / (p + 1.0); };
    return (F(a + theta * hi) - F(a + theta * lo)) / theta;
}

double simplex_scale(std::size_t n)
{
    return std::pow(std::tgamma(static_cast<double>(n) + 1.0), 1.0 / static_cast<double>(n));
}
}  // namespace

//---------------------------------------------------------------------------//
// Reports
//---------------------------------------------------------------------------//

Json ExperimentReport::to_json() const
{
    Json j;
    j["command"] = command;
    j["config"] = config;
    j["verdict"] = verdict();
    j["summary"] = summary;
    j["timing"] = work;
    return j;
}

std::string ExperimentReport::trials_csv() const
{
    std::ostringstream os;
    os.precision(17);
    os << "trial_index,side,value,stderr\n";
    for (const TrialRow& r : trials)
        os << r.index << ',' << r.side << ',' << r.value << ',' << r.std_error << '\n';
    return os.str();
}

//---------------------------------------------------------------------------//
// Expectation and dominance
//---------------------------------------------------------------------------//

PairedTrials run_paired_trials(const ExperimentConfig& cfg, unsigned threads)
{
    validate(cfg);
    const std::size_t n = cfg.n, N = cfg.N;
    const RadialMeasure measure = cfg.measure.build(n);
    const CoefficientGauge gauge = cfg.gauge.build(N);
    const bool exact = cfg.estimator == "exact";

    auto run_side = [&](const PnDensity& law, std::uint64_t side) {
        SideValues out;
        out.value.resize(cfg.trials);
        out.std_error.resize(cfg.trials);
        const RngStream base{cfg.seed, side};
        parallel_for(cfg.trials, threads, [&](std::size_t i) {
            const RngStream trial = base.substream(i);
            RandomEngine eng(trial.substream(0));
            Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(N));
            Vector x(static_cast<Eigen::Index>(n));
            for (std::size_t j = 0; j < N; ++j)
            {
                sample_density_into(law, eng, x);
                a.col(static_cast<Eigen::Index>(j)) = x;
            }
            const Body body = Body::matrix_image(std::move(a), gauge, cfg.rball);
            if (exact)
            {
                out.value[i] = *exact_polar_measure(body, measure);
                out.std_error[i] = 0.0;
            }
            else
            {
                const Estimate e = mc_polar_measure(body, measure, cfg.budgetPerTrial, trial.substream(1));
                out.value[i] = e.value;
                out.std_error[i] = e.std_error;
            }
        });
        return out;
    };

    PairedTrials t;
    const PnDensity law_x = cfg.lawX.build(n);
    t.x = run_side(law_x, 1);
    t.z = run_side(PnDensity::uniform_Dn(n), 2);
    std::uint64_t sides = 2;
    if (cfg.threeWay)
    {
        t.rearranged = run_side(PnDensity::radial_step(rearrange_density(law_x)), 3);
        ++sides;
    }
    t.mc_samples = exact ? 0 : sides * cfg.trials * cfg.budgetPerTrial;
    return t;
}

ExperimentReport summarize_expectation(const ExperimentConfig& cfg, const PairedTrials& t)
{
    ExperimentReport rep;
    rep.command = "santalo";
    rep.config = to_json(cfg);
    const Moments mx = moments(t.x.value), mz = moments(t.z.value);
    const double combined = std::hypot(mx.std_error, mz.std_error);
    const double gap = mz.mean - mx.mean;
    rep.pass = gap >= -3.0 * combined;
    rep.summary = {{"X", side_json(mx)},
                   {"Z", side_json(mz)},
                   {"gap", gap},
                   {"combined_stderr", combined},
                   {"margin", -3.0 * combined},
                   {"trials", cfg.trials}};
    if (t.rearranged)
    {
        const Moments mr = moments(t.rearranged->value);
        const bool xr = mr.mean - mx.mean >= -3.0 * std::hypot(mx.std_error, mr.std_error);
        const bool rz = mz.mean - mr.mean >= -3.0 * std::hypot(mr.std_error, mz.std_error);
        rep.summary["R"] = side_json(mr);
        rep.summary["ordered_X_R"] = xr;
        rep.summary["ordered_R_Z"] = rz;
        rep.pass = rep.pass && xr && rz;
    }
    rep.work = {{"trials", cfg.trials}, {"mc_samples", t.mc_samples}};
    rep.trials = side_rows(t.x, "X");
    for (auto& r : side_rows(t.z, "Z"))
        rep.trials.push_back(r);
    if (t.rearranged)
        for (auto& r : side_rows(*t.rearranged, "R"))
            rep.trials.push_back(r);
    return rep;
}

ExperimentReport summarize_dominance(const ExperimentConfig& cfg, const PairedTrials& t)
{
    ExperimentReport rep;
    rep.command = "dominance";
    rep.config = to_json(cfg);

    double lo = kInf, hi = -kInf;
    for (const auto* side : {&t.x.value, &t.z.value})
        for (double v : *side)
        {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const std::size_t L = cfg.survivalLevels;
    const double trials_x = static_cast<double>(t.x.value.size());
    const double trials_z = static_cast<double>(t.z.value.size());
    auto survival = [](const std::vector<double>& v, double level) {
        const auto count = std::count_if(v.begin(), v.end(), [&](double x) { return x >= level; });
        return static_cast<double>(count) / static_cast<double>(v.size());
    };

    std::vector<double> grid(L), sx(L), sz(L), se(L);
    double worst = -kInf;
    bool ok = true;
    std::ostringstream csv;
    csv.precision(17);
    csv << "t,survival_X,survival_Z,stderr\n";
    for (std::size_t j = 0; j < L; ++j)
    {
        grid[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(L - 1);
        sx[j] = survival(t.x.value, grid[j]);
        sz[j] = survival(t.z.value, grid[j]);
        se[j] = std::sqrt(sx[j] * (1.0 - sx[j]) / trials_x + sz[j] * (1.0 - sz[j]) / trials_z);
        const double excess = sx[j] - sz[j] - 3.0 * se[j];
        worst = std::max(worst, excess);
        ok = ok && excess <= 0.0;
        csv << grid[j] << ',' << sx[j] << ',' << sz[j] << ',' << se[j] << '\n';
    }
    rep.pass = ok;
    rep.summary = {{"levels", grid},
                   {"survival_X", sx},
                   {"survival_Z", sz},
                   {"stderr", se},
                   {"worst_excess", worst},
                   {"X", side_json(moments(t.x.value))},
                   {"Z", side_json(moments(t.z.value))},
                   {"trials", cfg.trials}};
    rep.work = {{"trials", cfg.trials}, {"mc_samples", t.mc_samples}};
    rep.trials = side_rows(t.x, "X");
    for (auto& r : side_rows(t.z, "Z"))
        rep.trials.push_back(r);
    rep.extra_csv["survival.csv"] = csv.str();
    return rep;
}

ExperimentReport santalo_expectation_experiment(const ExperimentConfig& cfg, unsigned threads)
{
    return summarize_expectation(cfg, run_paired_trials(cfg, threads));
}

ExperimentReport stochastic_dominance_experiment(const ExperimentConfig& cfg, unsigned threads)
{
    return summarize_dominance(cfg, run_paired_trials(cfg, threads));
}

//---------------------------------------------------------------------------//
// Convergence
//---------------------------------------------------------------------------//

double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size() || a.size() < 2)
        return 0.0;
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();)
        {
            std::size_t k = i;
            while (k + 1 < idx.size() && v[idx[k + 1]] == v[idx[i]])
                ++k;
            const double avg = 0.5 * static_cast<double>(i + k) + 1.0;
            for (std::size_t m = i; m <= k; ++m)
                r[idx[m]] = avg;
            i = k + 1;
        }
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i)
    {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0)
        return 0.0;
    return sab / std::sqrt(saa * sbb);
}

ExperimentReport convergence_experiment(const ExperimentConfig& cfg)
{
    validate(cfg);
    const std::size_t n = cfg.n;
    const RadialMeasure measure = cfg.measure.build(n);
    const double R = cfg.measure.R;
    const std::size_t total = cfg.schedule.back();

    RandomEngine eng(RngStream{cfg.seed, 3});
    std::vector<Vector> path;
    const double rn = unit_volume_ball_radius(n);
    Vector z(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < total; ++i)
    {
        sample_uniform_ball_into(rn, eng, z);
        path.push_back(z);
    }

    // Bounding box from the first block; later polars are contained in it.
    const std::size_t first = cfg.schedule.front();
    double half_width = R;
    {
        Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(first));
        for (std::size_t j = 0; j < first; ++j)
            a.col(static_cast<Eigen::Index>(j)) = path[j];
        Eigen::JacobiSVD<Matrix> svd(a);
        const double smin = svd.singularValues()(static_cast<Eigen::Index>(n) - 1);
        if (smin > 0.0)
            half_width = std::min(half_width, std::sqrt(static_cast<double>(first)) / smin * (1.0 + 1e-9));
    }
    if (!std::isfinite(half_width))
        throw InfeasibleError("the first block of points does not span R^n and R is infinite");

    IncrementalPolar polar(n, R, half_width);
    std::vector<double> values;
    std::size_t added = 0;
    for (std::size_t N : cfg.schedule)
    {
        for (; added < N; ++added)
            polar.add(path[added]);
        values.push_back(polar.value());
    }

    bool monotone = true;
    for (std::size_t i = 1; i < values.size(); ++i)
        monotone = monotone && values[i] <= values[i - 1];
    const double target = measure.mass_within(1.0 / rn);
    const double rel = std::abs(values.back() - target) / target;

    // Continuity probe: volume gaps against Hausdorff distances over all pairs.
    const DirectionGrid grid = DirectionGrid::lattice(n, n == 1 ? 1 : (n == 2 ? 720 : 24));
    std::vector<Body> bodies;
    for (std::size_t N : cfg.schedule)
    {
        Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(N));
        for (std::size_t j = 0; j < N; ++j)
            a.col(static_cast<Eigen::Index>(j)) = path[j];
        bodies.push_back(Body::matrix_image(std::move(a), CoefficientGauge::lq(N, 1.0)));
    }
    std::vector<double> dh, dv;
    for (std::size_t i = 0; i < bodies.size(); ++i)
        for (std::size_t k = i + 1; k < bodies.size(); ++k)
        {
            dh.push_back(hausdorff_estimate(bodies[i], bodies[k], grid));
            dv.push_back(std::abs(values[i] - values[k]));
        }
    const double rho = spearman_correlation(dh, dv);
    const bool continuity = dh.empty() || rho > 0.0;

    ExperimentReport rep;
    rep.command = "converge";
    rep.config = to_json(cfg);
    rep.pass = monotone && rel <= cfg.band && continuity;
    rep.summary = {{"schedule", cfg.schedule},
                   {"values", values},
                   {"target", target},
                   {"final_relative_error", rel},
                   {"band", cfg.band},
                   {"monotone", monotone},
                   {"hausdorff_volume_spearman", rho},
                   {"continuity_probe", continuity}};
    rep.work = {{"points", total}, {"exact_evaluations", values.size()}};
    for (std::size_t i = 0; i < values.size(); ++i)
        rep.trials.push_back({cfg.schedule[i], "Z", values[i], 0.0});
    return rep;
}

//---------------------------------------------------------------------------//
// Centroid bodies
//---------------------------------------------------------------------------//

double centroid_support(const PnDensity& mu, double p, const Vector& y)
{
    if (!(p >= 1.0) || !std::isfinite(p))
        throw std::invalid_argument("centroid_support: p must be finite and >= 1");
    const std::size_t n = mu.dim();
    if (static_cast<std::size_t>(y.size()) != n)
        throw std::invalid_argument("centroid_support: dimension mismatch");
    const double len = y.norm();
    if (len == 0.0)
        return 0.0;
    const Vector theta = y / len;
    const double dn = static_cast<double>(n);

    if (mu.radial() || mu.shape() == PnDensity::Shape::ball)
    {
        const RadialStepFn f = mu.radial() ? *mu.radial() : rearrange_density(mu);
        double sum = 0.0, inner = 0.0;
        for (std::size_t j = 0; j < f.values().size(); ++j)
        {
            const double outer = f.breaks()[j];
            sum += f.values()[j] * (std::pow(outer, dn + p) - std::pow(inner, dn + p)) / (dn + p);
            inner = outer;
        }
        return len * std::pow(sum * sphere_abs_moment(n, p), 1.0 / p);
    }

    // Put the largest |theta_i| last; both shapes are permutation invariant.
    std::vector<double> th(theta.data(), theta.data() + n);
    std::iter_swap(std::max_element(th.begin(), th.end(),
                                    [](double a, double b) { return std::abs(a) < std::abs(b); }),
                   th.end() - 1);
    QuadOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-16;
    double moment = 0.0;

    if (mu.shape() == PnDensity::Shape::cube)
    {
        const double last = th.back();
        if (n == 1)
            moment = abs_pow_integral(0.0, last, -0.5, 0.5, p);
        else if (n == 2)
            moment = integrate([&](double x1) { return abs_pow_integral(th[0] * x1, last, -0.5, 0.5, p); },
                               -0.5, 0.5, opt);
        else
        {
            QuadOptions inner = opt;
            inner.rel_tol = 1e-11;
            moment = integrate(
                [&](double x1) {
                    return integrate(
                        [&](double x2) {
                            return abs_pow_integral(th[0] * x1 + th[1] * x2, last, -0.5, 0.5, p);
                        },
                        -0.5, 0.5, inner);
                },
                -0.5, 0.5, opt);
        }
    }
    else
    {
        if (n > 2)
            throw std::invalid_argument("centroid_support: simplex laws need n <= 2");
        const double s = simplex_scale(n), c = 1.0 / (dn + 1.0);
        if (n == 1)
            moment = abs_pow_integral(0.0, th[0], -c * s, s * (1.0 - c), p);
        else
            moment = integrate(
                [&](double x1) {
                    return abs_pow_integral(th[0] * x1, th[1], -c * s, s * (1.0 - 2.0 * c) - x1, p);
                },
                -c * s, s * (1.0 - c), opt);
    }
    return len * std::pow(moment, 1.0 / p);
}

CentroidPolar centroid_polar_measure(const PnDensity& mu, double p, const RadialMeasure& m,
                                     std::uint64_t directions, RngStream rng, unsigned threads)
{
    const std::size_t n = mu.dim();
    if (m.dim() != n)
        throw std::invalid_argument("centroid_polar_measure: dimension mismatch");
    if (n > 3)
        throw std::invalid_argument("centroid_polar_measure: n must be <= 3");
    auto polar_mass = [&](const Vector& theta) { return m.mass_within(1.0 / centroid_support(mu, p, theta)); };

    if (mu.radial() || mu.shape() == PnDensity::Shape::ball)
    {
        Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
        e(0) = 1.0;
        return {polar_mass(e), 0.0, "closed_form"};
    }
    if (n == 1)
    {
        Vector e(1);
        e(0) = 1.0;
        const double a = polar_mass(e);
        e(0) = -1.0;
        return {0.5 * (a + polar_mass(e)), 0.0, "closed_form"};
    }
    if (n == 2)
    {
        QuadOptions opt;
        opt.rel_tol = 1e-9;
        Vector th(2);
        const double total = integrate(
            [&](double phi) {
                th << std::cos(phi), std::sin(phi);
                return polar_mass(th);
            },
            0.0, 2.0 * std::numbers::pi, opt);
        return {total / (2.0 * std::numbers::pi), 0.0, "quadrature"};
    }
    if (directions < 2)
        throw std::invalid_argument("centroid_polar_measure: need at least 2 directions for n = 3");
    std::vector<double> vals(directions);
    parallel_for(directions, threads, [&](std::size_t i) {
        RandomEngine eng(rng.substream(i));
        Vector th(3);
        sample_direction_into(eng, th);
        vals[i] = polar_mass(th);
    });
    const Moments mo = moments(vals);
    return {mo.mean, mo.std_error, "monte_carlo_directions"};
}

ExperimentReport centroid_polar_experiment(const ExperimentConfig& cfg, unsigned threads)
{
    validate(cfg);
    const std::size_t n = cfg.n;
    const RadialMeasure measure = cfg.measure.build(n);
    const PnDensity mu = cfg.lawX.build(n);
    const CentroidPolar lhs
        = centroid_polar_measure(mu, cfg.p, measure, cfg.budgetPerTrial, RngStream{cfg.seed, 5}, threads);
    const CentroidPolar rhs = centroid_polar_measure(PnDensity::uniform_Dn(n), cfg.p, measure,
                                                     cfg.budgetPerTrial, RngStream{cfg.seed, 6}, threads);
    const double combined = std::hypot(lhs.std_error, rhs.std_error);
    const double slack = 3.0 * combined + 1e-6 * std::abs(rhs.value);

    ExperimentReport rep;
    rep.command = "centroid";
    rep.config = to_json(cfg);
    rep.pass = lhs.value <= rhs.value + slack;
    rep.summary = {{"nu_polar_Zp_mu", {{"value", lhs.value}, {"stderr", lhs.std_error}, {"method", lhs.method}}},
                   {"nu_polar_Zp_Dn", {{"value", rhs.value}, {"stderr", rhs.std_error}, {"method", rhs.method}}},
                   {"gap", rhs.value - lhs.value},
                   {"allowed_slack", slack},
                   {"p", cfg.p}};
    const bool sampled = lhs.method == "monte_carlo_directions";
    rep.work = {{"directions", sampled ? cfg.budgetPerTrial : 0}};
    rep.trials = {{0, "X", lhs.value, lhs.std_error}, {0, "Z", rhs.value, rhs.std_error}};
    return rep;
}

//---------------------------------------------------------------------------//
// Volume-normalized Santalo bound
//---------------------------------------------------------------------------//

ExperimentReport newsan_experiment(const ExperimentConfig& cfg, unsigned threads)
{
    validate(cfg);
    const std::size_t n = cfg.n;
    const RadialMeasure measure = cfg.measure.build(n);
    const Body body = cfg.body.build(n);
    const auto volume = body_volume(body);
    if (!volume)
        throw InfeasibleError("the volume of this body is not available exactly");
    const double tk = std::pow(*volume / unit_ball_volume(n), 1.0 / static_cast<double>(n));
    const double rhs = measure.mass_within(1.0 / tk);

    double lhs, se = 0.0;
    std::string method = "exact";
    std::uint64_t samples = 0;
    if (auto exact = exact_polar_measure(body, measure))
        lhs = *exact;
    else
    {
        const Estimate e = mc_polar_measure(body, measure, cfg.budgetPerTrial, RngStream{cfg.seed, 4}, threads);
        lhs = e.value;
        se = e.std_error;
        method = "monte_carlo";
        samples = e.samples;
    }
    const double slack = 3.0 * se + 1e-9 * std::abs(rhs);

    ExperimentReport rep;
    rep.command = "newsan";
    rep.config = to_json(cfg);
    rep.pass = lhs <= rhs + slack;
    rep.summary = {{"body_volume", *volume},
                   {"t_K", tk},
                   {"nu_polar_K", {{"value", lhs}, {"stderr", se}, {"method", method}}},
                   {"nu_polar_tK_ball", rhs},
                   {"gap", rhs - lhs},
                   {"allowed_slack", slack}};
    rep.work = {{"mc_samples", samples}};
    rep.trials = {{0, "X", lhs, se}, {0, "Z", rhs, 0.0}};
    return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, unsigned threads)
{
    switch (cfg.mode)
    {
    case Mode::expectation: return santalo_expectation_experiment(cfg, threads);
    case Mode::dominance: return stochastic_dominance_experiment(cfg, threads);
    case Mode::convergence: return convergence_experiment(cfg);
    case Mode::centroid: return centroid_polar_experiment(cfg, threads);
    case Mode::newsan: return newsan_experiment(cfg, threads);
    }
    throw std::invalid_argument("unknown mode");
}

}  // namespace randpolar
