// Runs the eleven acceptance criteria and prints one PASS/FAIL line each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "randpolar/analysis.hpp"
#include "randpolar/cli.hpp"
#include "randpolar/experiments.hpp"
#include "randpolar/volume.hpp"

using namespace randpolar;
namespace fs = std::filesystem;

namespace
{
constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

unsigned worker_threads()
{
    return std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
}

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

Vector random_gaussian(std::mt19937_64& g, std::size_t n)
{
    std::normal_distribution<double> z;
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        v(static_cast<Eigen::Index>(i)) = z(g);
    return v;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "randpolar");
    std::vector<char*> argv;
    for (auto& a : args)
        argv.push_back(a.data());
    std::ostringstream out, err;
    return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

// 1. MC on D_2 against pi^2. Every sample point lies in D_2°, so the
// estimator has zero variance; a few ulps of rounding are allowed on top of
// the 3 sigma margin.
Outcome ball_polar_closed_form()
{
    const auto start = std::chrono::steady_clock::now();
    const Estimate e = mc_polar_measure(Body::ball(2, unit_volume_ball_radius(2)), RadialMeasure::lebesgue(2),
                                        1000000, RngStream{1, 0}, 1);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double err = std::abs(e.value - kPi * kPi);
    const bool ok = err <= 3.0 * e.std_error + 64.0 * kEps * kPi * kPi && seconds < 10.0;
    return {ok, "value=" + fmt(e.value) + " stderr=" + fmt(e.std_error) + " |err|=" + fmt(err) + " time="
                    + fmt(seconds) + "s"};
}

// 2. MC against the exact oracle on random cross-polytopes.
Outcome exact_oracle_agreement()
{
    std::mt19937_64 g(20240601);
    int agree = 0;
    for (int c = 0; c < 50; ++c)
    {
        const std::size_t n = 2 + static_cast<std::size_t>(c % 2);
        const std::size_t N = n + static_cast<std::size_t>(g() % (7 - n));
        Matrix cols(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(N));
        for (std::size_t j = 0; j < N; ++j)
            cols.col(static_cast<Eigen::Index>(j)) = random_gaussian(g, n);
        const Body k = Body::matrix_image(cols, CoefficientGauge::lq(N, 1.0));
        const RadialMeasure m = RadialMeasure::lebesgue(n);
        const double exact = *exact_polar_measure(k, m);
        const Estimate e = mc_polar_measure(k, m, 200000, RngStream{static_cast<std::uint64_t>(c), 7}, worker_threads());
        agree += std::abs(e.value - exact) <= 3.0 * e.std_error;
    }
    return {agree >= 47, std::to_string(agree) + "/50 within 3 stderr"};
}

// 3 and 4 share one paired run.
struct SantaloRun
{
    PairedTrials trials;
    ExperimentConfig cfg;
    double seconds = 0.0;
};

SantaloRun desk_scale_run()
{
    ExperimentConfig cfg;
    cfg.n = 2;
    cfg.N = 4;
    cfg.gauge = GaugeSpec{"lq", 1.0, {}};
    cfg.lawX = DensitySpec{"uniform_cube", {}, {}};
    cfg.measure = MeasureSpec{"lebesgue_ball", 5.0, 1.0, {}};
    cfg.trials = 2000;
    cfg.budgetPerTrial = 100000;
    cfg.survivalLevels = 50;
    cfg.seed = 2024;
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    PairedTrials t = run_paired_trials(cfg, worker_threads());
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(t), cfg, seconds};
}

Outcome santalo_expectation(const SantaloRun& r)
{
    const ExperimentReport rep = summarize_expectation(r.cfg, r.trials);
    const bool ok = rep.pass && r.seconds < 900.0;
    return {ok, "mean_X=" + fmt(rep.summary["X"]["mean"]) + " mean_Z=" + fmt(rep.summary["Z"]["mean"]) + " gap="
                    + fmt(rep.summary["gap"]) + " margin=" + fmt(rep.summary["margin"]) + " time=" + fmt(r.seconds)
                    + "s (" + std::to_string(worker_threads()) + " threads)"};
}

Outcome santalo_dominance(const SantaloRun& r)
{
    ExperimentConfig cfg = r.cfg;
    cfg.mode = Mode::dominance;
    validate(cfg);
    const ExperimentReport rep = summarize_dominance(cfg, r.trials);
    return {rep.pass, "levels=" + std::to_string(rep.summary["levels"].size())
                          + " worst_excess=" + fmt(rep.summary["worst_excess"])};
}

// 5. Exact shadow profile: even and midpoint convex to 1e-9.
Outcome shadow_convexity()
{
    ShadowRunConfig run = shadow_config_from_json(Json::parse(slurp(std::string(RANDPOLAR_CONFIG_DIR) + "/shadow.json")));
    double norm = 0.0;
    for (double d : run.direction)
        norm += d * d;
    for (double& d : run.direction)
        d /= std::sqrt(norm);
    const ShadowConfig cfg = build_shadow_config(run);
    const ProfileReport p = shadow_profile(cfg, run.direction, run.tGrid, 0, RngStream{0, 0}, ProfileEstimator::exact);
    const ProfileVerdict v = convexity_even_check(p, 1e-9);
    const bool ok = p.method == "exact" && p.t.size() == 11 && run.base.size() == 3 && v.even && v.midpoint_convex;
    return {ok, "grid=" + std::to_string(p.t.size()) + " even=" + (v.even ? "yes" : "no") + " convex="
                    + (v.midpoint_convex ? "yes" : "no") + " worst_violation=" + fmt(v.worst_violation)};
}

// 6. Busemann triangle inequality and the Gaussian closed form.
Outcome busemann()
{
    std::mt19937_64 g(6);
    const DensityOracle square = DensityOracle::cube_indicator(2);
    const DensityOracle gauss = DensityOracle::gaussian_factor(2);
    double worst_triangle = -std::numeric_limits<double>::infinity(), worst_gauss = 0.0;
    for (int i = 0; i < 200; ++i)
    {
        const Vector a = random_gaussian(g, 2), b = random_gaussian(g, 2);
        worst_triangle = std::max(worst_triangle, busemann_gauge(square, a + b) - busemann_gauge(square, a)
                                                      - busemann_gauge(square, b));
        worst_gauss = std::max(worst_gauss, std::abs(busemann_gauge(gauss, a) - a.norm() / std::sqrt(2.0 * kPi)));
    }
    return {worst_triangle <= 1e-6 && worst_gauss <= 1e-6,
            "max triangle excess=" + fmt(worst_triangle) + " max gaussian error=" + fmt(worst_gauss)};
}

// 7. RBLL on the exhaustive family.
Outcome rbll()
{
    const RbllSummary s = rbll_check_family(rbll_exhaustive_family(), 1e-9, worker_threads());
    return {s.violations == 0 && s.symmetric_inequalities == 0,
            std::to_string(s.cases) + " cases, violations=" + std::to_string(s.violations) + ", symmetric cases="
                + std::to_string(s.symmetric_cases) + " with inequality=" + std::to_string(s.symmetric_inequalities)
                + ", worst lhs-rhs=" + fmt(s.worst_gap)};
}

// 8. Rearrangement of random step densities.
Outcome rearrangement()
{
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_level = 0.0, worst_norm = 0.0;
    for (int trial = 0; trial < 1000; ++trial)
    {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
        std::vector<double> breaks, values;
        double r = 0.0;
        const int pieces = 1 + static_cast<int>(g() % 6);
        for (int i = 0; i < pieces; ++i)
        {
            r += 0.05 + u(g);
            breaks.push_back(r);
            values.push_back(g() % 4 == 0 ? 0.0 : u(g));
        }
        const RadialStepFn f(n, breaks, values);
        const RadialStepFn s = rearrange_density(f);
        for (double v : f.values())
            for (double a : {v, 0.999 * v})
            {
                const double lf = f.level_volume(a), ls = s.level_volume(a);
                worst_level = std::max(worst_level, std::abs(lf - ls) / std::max(lf, 1e-300));
            }
        for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()})
        {
            const double nf = f.lp_norm(p), ns = s.lp_norm(p);
            worst_norm = std::max(worst_norm, std::abs(nf - ns) / std::max(nf, 1e-300));
        }
    }
    // Level-set volumes are recomputed from rearranged radii, so equality
    // holds up to rounding.
    return {worst_level <= 1e-12 && worst_norm <= 1e-9,
            "max relative level-volume error=" + fmt(worst_level) + " max relative L_p error=" + fmt(worst_norm)};
}

// 9. Convergence path.
Outcome convergence()
{
    ExperimentConfig cfg;
    cfg.mode = Mode::convergence;
    cfg.n = 2;
    cfg.measure = MeasureSpec{"lebesgue_ball", kInfinity, 1.0, {}};
    cfg.seed = 1;
    cfg.band = 0.05;
    const ExperimentReport r = convergence_experiment(cfg);
    const bool monotone = r.summary["monotone"].get<bool>();
    const double err = r.summary["final_relative_error"].get<double>();
    return {monotone && err <= cfg.band,
            std::string("monotone=") + (monotone ? "yes" : "no") + " final=" + fmt(r.summary["values"].back())
                + " relative error=" + fmt(err) + " band=" + fmt(cfg.band)};
}

// 10. Byte-identical reports across thread counts.
Outcome determinism()
{
    const std::string dir = RANDPOLAR_CONFIG_DIR;
    const std::vector<std::vector<std::string>> commands{
        {"polar-volume", "--config", dir + "/polar_volume_crosspoly.json", "--budget", "300000"},
        {"santalo", "--config", dir + "/santalo.json", "--budget", "3000"},
        {"dominance", "--config", dir + "/dominance.json", "--budget", "3000"},
        {"converge", "--config", dir + "/converge.json"},
        {"shadow", "--config", dir + "/shadow.json"},
        {"busemann", "--config", dir + "/busemann.json"},
        {"gauge", "--config", dir + "/gauge.json"},
        {"brunn", "--config", dir + "/brunn.json"},
        {"rbll"},
        {"centroid", "--config", dir + "/centroid.json"},
        {"newsan", "--config", dir + "/newsan.json"},
    };
    int identical = 0;
    std::string mismatched;
    for (const auto& cmd : commands)
    {
        std::vector<std::string> reports, csvs;
        for (const char* threads : {"1", "4", "1"})
        {
            const fs::path out = fs::temp_directory_path() / ("randpolar_accept_" + cmd[0] + "_" + threads);
            fs::remove_all(out);
            std::vector<std::string> args = cmd;
            for (const std::string& extra : {std::string("--out"), out.string(), std::string("--threads"), std::string(threads)})
                args.push_back(extra);
            const int code = run_cli(args);
            reports.push_back(code <= 1 ? slurp(out / "report.json") : "exit " + std::to_string(code));
            csvs.push_back(code <= 1 ? slurp(out / "trials.csv") : "");
        }
        const bool same = !reports[0].empty() && reports[0] == reports[1] && reports[0] == reports[2]
                          && csvs[0] == csvs[1] && csvs[0] == csvs[2];
        identical += same;
        if (!same)
            mismatched += " " + cmd[0];
    }
    return {identical == static_cast<int>(commands.size()),
            std::to_string(identical) + "/" + std::to_string(commands.size())
                + " commands byte-identical across --threads 1/4 and reruns" + (mismatched.empty() ? "" : ";") + mismatched};
}

// 11. False-FAIL rate with identical laws.
Outcome null_calibration()
{
    int fails = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
    {
        ExperimentConfig cfg;
        cfg.n = 2;
        cfg.N = 4;
        cfg.lawX = DensitySpec{"uniform_Dn", {}, {}};
        cfg.measure = MeasureSpec{"lebesgue_ball", 5.0, 1.0, {}};
        cfg.trials = 50;
        cfg.budgetPerTrial = 2000;
        cfg.seed = seed;
        fails += !santalo_expectation_experiment(cfg, worker_threads()).pass;
    }
    return {fails <= 1, std::to_string(fails) + "/100 false FAIL"};
}
}  // namespace

int main()
{
    int failures = 0;
    auto report = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
        Outcome o;
        try
        {
            o = fn();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << name << ": " << o.detail << std::endl;
    };

    report(1, "ball polar closed form", ball_polar_closed_form);
    report(2, "exact-oracle agreement", exact_oracle_agreement);
    SantaloRun desk;
    bool desk_ok = true;
    std::string desk_error;
    try
    {
        desk = desk_scale_run();
    }
    catch (const std::exception& e)
    {
        desk_ok = false;
        desk_error = e.what();
    }
    report(3, "expectation inequality at desk scale", [&]() -> Outcome {
        if (!desk_ok)
            return {false, "exception: " + desk_error};
        return santalo_expectation(desk);
    });
    report(4, "stochastic dominance", [&]() -> Outcome {
        if (!desk_ok)
            return {false, "exception: " + desk_error};
        return santalo_dominance(desk);
    });
    report(5, "shadow profile convexity", shadow_convexity);
    report(6, "Busemann triangle inequality", busemann);
    report(7, "rearrangement inequality oracle", rbll);
    report(8, "rearrangement equimeasurability", rearrangement);
    report(9, "convergence to the ball polar", convergence);
    report(10, "determinism across threads", determinism);
    report(11, "null calibration", null_calibration);

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
