#include "randpolar/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "randpolar/analysis.hpp"
#include "randpolar/error.hpp"
#include "randpolar/volume.hpp"

namespace randpolar
{

namespace
{

class IoError : public Error
{
  public:
    using Error::Error;
};

Vector to_vec(const std::vector<double>& v)
{
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector normal_vector(std::size_t n, RandomEngine& eng)
{
    Vector z(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < z.size(); ++i)
        z(i) = eng.normal();
    return z;
}

void override_key(Json& j, const char* key, std::uint64_t value)
{
    if (!j.is_object())
        throw ConfigError("config", "must be a JSON object");
    j[key] = value;
}

//---------------------------------------------------------------------------//
// polar-volume
//---------------------------------------------------------------------------//

ExperimentReport polar_volume_command(const PolarVolumeConfig& c, unsigned threads)
{
    const Body body = c.body.build(c.n);
    const RadialMeasure m = c.measure.build(c.n);
    const RngStream rng{c.seed, 0};
    const std::optional<double> exact = exact_polar_measure(body, m);

    ExperimentReport rep;
    rep.command = "polar-volume";
    rep.config = to_json(c);
    Estimate e;
    bool low_accuracy = false;
    if (c.estimator == "exact")
    {
        if (!exact)
            throw InfeasibleError("no exact oracle for this body and measure");
        e.value = *exact;
        e.seed = c.seed;
    }
    else if (c.estimator == "mc")
        e = mc_polar_measure(body, m, c.budget, rng, threads);
    else
    {
        const LayerCakeResult lc = layer_cake_measure(body, m, default_level_grid(m, c.levels), c.budget, rng, threads);
        e = lc.estimate;
        low_accuracy = lc.low_accuracy;
        rep.summary["levels"] = lc.levels.size();
    }
    rep.summary["estimate"] = e;
    rep.summary["low_accuracy"] = low_accuracy;
    bool ok = std::isfinite(e.value) && e.value >= 0.0;
    if (exact && c.estimator != "exact")
    {
        const double diff = std::abs(e.value - *exact);
        const bool agrees = diff <= 3.0 * e.std_error + 1e-9 * std::abs(*exact);
        rep.summary["exact"] = *exact;
        rep.summary["abs_difference"] = diff;
        rep.summary["agrees_with_exact"] = agrees;
        if (c.estimator == "mc")
            ok = ok && agrees;
    }
    rep.pass = ok;
    rep.work = {{"mc_samples", e.samples}};
    rep.trials = {{0, "X", e.value, e.std_error}};
    return rep;
}

//---------------------------------------------------------------------------//
// shadow and brunn profiles
//---------------------------------------------------------------------------//

std::vector<TrialRow> profile_rows(const ProfileReport& p)
{
    std::vector<TrialRow> rows;
    for (std::size_t i = 0; i < p.t.size(); ++i)
        rows.push_back({i, "X", p.value[i], p.std_error[i]});
    return rows;
}

ExperimentReport shadow_command(const ShadowRunConfig& c, unsigned threads)
{
    const ProfileEstimator est = c.estimator == "exact" ? ProfileEstimator::exact
                                 : c.estimator == "mc"  ? ProfileEstimator::monte_carlo
                                                        : ProfileEstimator::automatic;
    const ProfileReport p = shadow_profile(build_shadow_config(c), c.direction, c.tGrid, c.budget,
                                           RngStream{c.seed, 0}, est, threads);
    ExperimentReport rep;
    rep.command = "shadow";
    rep.config = to_json(c);
    rep.pass = p.verdict.even && p.verdict.midpoint_convex;
    rep.summary = profile_json(p);
    const bool sampled = p.method == "monte_carlo";
    rep.work = {{"grid_points", p.t.size()}, {"mc_samples", sampled ? c.budget * p.t.size() : 0}};
    rep.trials = profile_rows(p);
    rep.extra_csv["profile.csv"] = profile_csv(p);
    return rep;
}

ExperimentReport brunn_command(const BrunnConfig& c)
{
    const ProfileReport p = brunn_profile(brunn_oracle(c.phi, c.n), c.alpha, c.tGrid);
    ExperimentReport rep;
    rep.command = "brunn";
    rep.config = to_json(c);
    rep.pass = p.verdict.midpoint_convex;
    rep.summary = profile_json(p);
    rep.work = {{"grid_points", p.t.size()}};
    rep.trials = profile_rows(p);
    rep.extra_csv["profile.csv"] = profile_csv(p);
    return rep;
}

//---------------------------------------------------------------------------//
// busemann and gauge
//---------------------------------------------------------------------------//

ExperimentReport busemann_command(const BusemannConfig& c)
{
    const DensityOracle psi = density_oracle(c.density, c.n);
    const ConcavityCheck hyp = concavity_spot_check(psi, RngStream{c.seed, 2}, c.segments);
    const bool gaussian = c.density == "gaussian";
    const double gaussian_scale = std::pow(2.0 * std::numbers::pi, 0.5 * static_cast<double>(c.n - 1));

    ExperimentReport rep;
    rep.command = "busemann";
    rep.config = to_json(c);
    std::size_t violations = 0;
    double worst_excess = -kInfinity, closed_form_error = 0.0;
    const RngStream base{c.seed, 1};
    for (std::size_t i = 0; i < c.pairs; ++i)
    {
        RandomEngine eng(base.substream(i));
        const Vector z1 = normal_vector(c.n, eng), z2 = normal_vector(c.n, eng);
        const double f1 = busemann_gauge(psi, z1), f2 = busemann_gauge(psi, z2);
        const double f12 = busemann_gauge(psi, z1 + z2);
        const double excess = f12 - f1 - f2;
        worst_excess = std::max(worst_excess, excess);
        if (excess > 1e-6)
            ++violations;
        if (gaussian)
        {
            closed_form_error = std::max(closed_form_error, std::abs(f1 - z1.norm() / gaussian_scale));
            closed_form_error = std::max(closed_form_error, std::abs(f2 - z2.norm() / gaussian_scale));
        }
        rep.trials.push_back({i, "X", f1 + f2 - f12, 0.0});
    }
    rep.pass = violations == 0 && closed_form_error <= 1e-6;
    rep.summary = {{"pairs", c.pairs},
                   {"violations", violations},
                   {"worst_excess", worst_excess},
                   {"tolerance", 1e-6},
                   {"hypothesis", hyp.verified ? "verified" : "hypothesis-unverified"},
                   {"concavity", {{"segments", hyp.segments}, {"worst_violation", hyp.worst_violation}}}};
    if (gaussian)
        rep.summary["closed_form_max_error"] = closed_form_error;
    rep.work = {{"gauge_evaluations", 3 * c.pairs}};
    return rep;
}

ExperimentReport gauge_command(const GaugeRunConfig& c)
{
    const DensityOracle f = density_oracle(c.density, c.n);
    std::vector<Vector> subspace;
    for (const auto& e : c.subspace)
        subspace.push_back(to_vec(e));
    // Orthonormal basis of the subspace, for projecting samples off it.
    std::vector<Vector> basis;
    for (const Vector& e : subspace)
    {
        Vector u = e;
        for (const Vector& b : basis)
            u -= u.dot(b) * b;
        if (u.norm() <= 1e-12)
            throw ConfigError("subspace", "vectors must be linearly independent");
        basis.push_back(u.normalized());
    }
    const bool mp = c.gauge == "milman_pajor";
    auto gauge = [&](const Vector& v) {
        return mp ? milman_pajor_gauge(f, subspace, c.p, v) : ball_bobkov_gauge(f, c.p, v);
    };
    auto draw = [&](RandomEngine& eng) {
        Vector v = normal_vector(c.n, eng);
        for (const Vector& b : basis)
            v -= v.dot(b) * b;
        return v;
    };

    ExperimentReport rep;
    rep.command = "gauge";
    rep.config = to_json(c);
    std::size_t violations = 0;
    double worst_excess = -kInfinity, worst_homogeneity = 0.0;
    const RngStream base{c.seed, 1};
    for (std::size_t i = 0; i < c.samples; ++i)
    {
        RandomEngine eng(base.substream(i));
        const Vector a = draw(eng), b = draw(eng);
        const double fa = gauge(a), fb = gauge(b), fab = gauge(a + b);
        const double excess = fab - fa - fb;
        worst_excess = std::max(worst_excess, excess);
        if (excess > 1e-6 * std::max(1.0, fa + fb))
            ++violations;
        const double f2a = gauge(2.5 * a);
        worst_homogeneity = std::max(worst_homogeneity, std::abs(f2a - 2.5 * fa) / std::max(1e-300, 2.5 * fa));
        rep.trials.push_back({i, "X", fa + fb - fab, 0.0});
    }
    rep.pass = violations == 0 && worst_homogeneity <= 1e-9;
    rep.summary = {{"samples", c.samples},
                   {"triangle_violations", violations},
                   {"worst_triangle_excess", worst_excess},
                   {"worst_homogeneity_error", worst_homogeneity},
                   {"tolerance", 1e-6}};
    rep.work = {{"gauge_evaluations", 4 * c.samples}};
    return rep;
}

//---------------------------------------------------------------------------//
// rbll
//---------------------------------------------------------------------------//

ExperimentReport rbll_command(const RbllConfig& c, unsigned threads)
{
    const RbllSummary s = rbll_check_family(build_rbll_cases(c), c.tolerance, threads);
    ExperimentReport rep;
    rep.command = "rbll";
    rep.config = to_json(c);
    rep.pass = s.violations == 0 && s.symmetric_inequalities == 0;
    rep.summary = {{"cases", s.cases},
                   {"violations", s.violations},
                   {"symmetric_cases", s.symmetric_cases},
                   {"symmetric_inequalities", s.symmetric_inequalities},
                   {"worst_gap", s.worst_gap},
                   {"tolerance", c.tolerance}};
    rep.work = {{"cases", s.cases}};
    for (std::size_t i = 0; i < s.results.size(); ++i)
    {
        rep.trials.push_back({i, "X", s.results[i].lhs, 0.0});
        rep.trials.push_back({i, "Z", s.results[i].rhs, 0.0});
    }
    return rep;
}

std::optional<Mode> experiment_mode(const std::string& command)
{
    if (command == "santalo")
        return Mode::expectation;
    if (command == "dominance")
        return Mode::dominance;
    if (command == "converge")
        return Mode::convergence;
    if (command == "centroid")
        return Mode::centroid;
    if (command == "newsan")
        return Mode::newsan;
    return std::nullopt;
}

bool config_optional(const std::string& command)
{
    return command == "rbll" || command == "busemann" || command == "gauge" || command == "brunn";
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out)
        throw IoError("cannot write " + path.string());
}

}  // namespace

const std::vector<std::string>& cli_commands()
{
    static const std::vector<std::string> commands{"polar-volume", "santalo", "dominance", "converge",
                                                   "shadow",       "busemann", "gauge",     "brunn",
                                                   "rbll",         "centroid", "newsan"};
    return commands;
}

ExperimentReport run_command_report(const std::string& command, Json config,
                                    std::optional<std::uint64_t> seed,
                                    std::optional<std::uint64_t> budget, unsigned threads)
{
    if (config.is_null())
        config = Json::object();
    if (!config.is_object())
        throw ConfigError("config", "must be a JSON object");

    if (auto mode = experiment_mode(command))
    {
        if (config.contains("mode") && config["mode"] != to_string(*mode))
            throw ConfigError("mode", "does not match the command " + command);
        config["mode"] = to_string(*mode);
        if (seed)
            override_key(config, "seed", *seed);
        if (budget)
        {
            if (*mode == Mode::convergence)
                throw ConfigError("--budget", "has no effect for converge (values are exact)");
            override_key(config, "budgetPerTrial", *budget);
        }
        return run_experiment(experiment_config_from_json(config), threads);
    }

    auto no_budget = [&] {
        if (budget)
            throw ConfigError("--budget", "has no effect for " + command + " (it is deterministic)");
    };
    if (command == "polar-volume")
    {
        if (seed)
            override_key(config, "seed", *seed);
        if (budget)
            override_key(config, "budget", *budget);
        return polar_volume_command(polar_volume_config_from_json(config), threads);
    }
    if (command == "shadow")
    {
        if (seed)
            override_key(config, "seed", *seed);
        if (budget)
            override_key(config, "budget", *budget);
        return shadow_command(shadow_config_from_json(config), threads);
    }
    if (command == "busemann")
    {
        if (seed)
            override_key(config, "seed", *seed);
        if (budget)
            override_key(config, "pairs", *budget);
        return busemann_command(busemann_config_from_json(config));
    }
    if (command == "gauge")
    {
        if (seed)
            override_key(config, "seed", *seed);
        if (budget)
            override_key(config, "samples", *budget);
        return gauge_command(gauge_config_from_json(config));
    }
    if (command == "brunn")
    {
        no_budget();
        return brunn_command(brunn_config_from_json(config));
    }
    if (command == "rbll")
    {
        no_budget();
        return rbll_command(rbll_config_from_json(config), threads);
    }
    throw ConfigError("command", "unknown command " + command);
}

int run_command(const CliInvocation& inv, std::ostream& out, std::ostream& err)
{
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport rep;
    try
    {
        Json config = Json::object();
        if (!inv.config_path.empty())
        {
            const std::string text = read_file(inv.config_path);
            try
            {
                config = Json::parse(text);
            }
            catch (const Json::parse_error& e)
            {
                throw ConfigError("config", std::string("is not valid JSON: ") + e.what());
            }
        }
        else if (!config_optional(inv.command))
            throw ConfigError("--config", "is required for " + inv.command);
        rep = run_command_report(inv.command, std::move(config), inv.seed, inv.budget, inv.threads);

        const std::filesystem::path dir(inv.out_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw IoError("cannot create " + dir.string() + ": " + ec.message());
        write_file(dir / "report.json", rep.to_json().dump(2) + "\n");
        write_file(dir / "trials.csv", rep.trials_csv());
        for (const auto& [name, text] : rep.extra_csv)
            write_file(dir / name, text);
    }
    catch (const IoError& e)
    {
        err << inv.command << ": I/O error: " << e.what() << '\n';
        return kExitIo;
    }
    catch (const ConfigError& e)
    {
        err << inv.command << ": config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const InfeasibleError& e)
    {
        err << inv.command << ": infeasible: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const std::invalid_argument& e)
    {
        err << inv.command << ": config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const std::exception& e)
    {
        err << inv.command << ": error: " << e.what() << '\n';
        return kExitFail;
    }

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << inv.command << ": " << rep.verdict() << "  -> " << (std::filesystem::path(inv.out_dir) / "report.json").string()
        << "  (" << std::fixed << std::setprecision(2) << seconds << " s)\n";
    return rep.pass ? kExitPass : kExitFail;
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Measures of polars of random convex sets: experiments and checkers"};
    app.require_subcommand(1);
    CliInvocation inv;
    std::uint64_t seed = 0, budget = 0;
    static const std::map<std::string, std::string> blurb{
        {"polar-volume", "measure of the polar of one body"},
        {"santalo", "expectation inequality, random body vs ball law"},
        {"dominance", "survival-curve ordering, random body vs ball law"},
        {"converge", "polar volumes along a growing D_n path"},
        {"shadow", "shadow-system profile convexity"},
        {"busemann", "Busemann gauge triangle inequality"},
        {"gauge", "Milman-Pajor or Ball-Bobkov gauge checks"},
        {"brunn", "Brunn profile against closed forms"},
        {"rbll", "rearrangement inequality oracle"},
        {"centroid", "L_p centroid body comparison"},
        {"newsan", "polar measure vs rearranged body"}};
    for (const std::string& name : cli_commands())
    {
        CLI::App* sub = app.add_subcommand(name, blurb.at(name));
        sub->add_option("--config", inv.config_path, "JSON config file");
        sub->add_option("--out", inv.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "seed override");
        sub->add_option("--budget", budget, "sample budget override")->check(CLI::PositiveNumber);
        sub->add_option("--threads", inv.threads, "worker threads (speed only)")->check(CLI::Range(1u, 1024u));
    }
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e, out, err);
        return kExitConfig;
    }
    CLI::App* sub = app.get_subcommands().front();
    inv.command = sub->get_name();
    if (sub->count("--seed"))
        inv.seed = seed;
    if (sub->count("--budget"))
        inv.budget = budget;
    return run_command(inv, out, err);
}

}  // namespace randpolar
