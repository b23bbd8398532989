#include "randpolar/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "randpolar/error.hpp"

namespace randpolar
{

namespace
{

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

std::string fmt(double x)
{
    std::ostringstream os;
    os << x;
    return os.str();
}

// Numbers may also be given as "inf" / "+inf".
double as_number(const Json& j, const std::string& path)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string())
    {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "infinity")
            return kInfinity;
    }
    throw ConfigError(path, "must be a number");
}

Json number_json(double x)
{
    if (std::isinf(x) && x > 0)
        return "inf";
    return x;
}

std::uint64_t as_count(const Json& j, const std::string& path)
{
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
        throw ConfigError(path, "must be a nonnegative integer");
    return j.get<std::uint64_t>();
}

/*!
 * Field access on a JSON object with path-qualified diagnostics. Unknown keys
 * are rejected by `finish`.
 */
class Reader
{
  public:
    Reader(const Json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(path_.empty() ? "config" : path_, "must be a JSON object");
    }

    bool has(const std::string& key)
    {
        seen_.insert(key);
        return j_.contains(key);
    }
    std::string at(const std::string& key) const { return join(path_, key); }
    const Json& raw(const std::string& key)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            throw ConfigError(at(key), "is required");
        return j_.at(key);
    }

    double number(const std::string& key, double def)
    {
        return has(key) ? as_number(j_.at(key), at(key)) : def;
    }
    double number(const std::string& key) { return as_number(raw(key), at(key)); }
    std::uint64_t count(const std::string& key, std::uint64_t def)
    {
        return has(key) ? as_count(j_.at(key), at(key)) : def;
    }
    std::string string(const std::string& key, const std::string& def)
    {
        if (!has(key))
            return def;
        if (!j_.at(key).is_string())
            throw ConfigError(at(key), "must be a string");
        return j_.at(key).get<std::string>();
    }
    bool boolean(const std::string& key, bool def)
    {
        if (!has(key))
            return def;
        if (!j_.at(key).is_boolean())
            throw ConfigError(at(key), "must be true or false");
        return j_.at(key).get<bool>();
    }
    std::vector<double> numbers(const std::string& key, std::vector<double> def)
    {
        if (!has(key))
            return def;
        return numbers_of(j_.at(key), at(key));
    }
    std::vector<double> numbers(const std::string& key) { return numbers_of(raw(key), at(key)); }
    std::vector<std::vector<double>> rows(const std::string& key,
                                          std::vector<std::vector<double>> def = {})
    {
        if (!has(key))
            return def;
        const Json& a = j_.at(key);
        if (!a.is_array())
            throw ConfigError(at(key), "must be an array of arrays");
        std::vector<std::vector<double>> out;
        for (std::size_t i = 0; i < a.size(); ++i)
            out.push_back(numbers_of(a[i], at(key) + "[" + std::to_string(i) + "]"));
        return out;
    }

    static std::vector<double> numbers_of(const Json& a, const std::string& path)
    {
        if (!a.is_array())
            throw ConfigError(path, "must be an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < a.size(); ++i)
            out.push_back(as_number(a[i], path + "[" + std::to_string(i) + "]"));
        return out;
    }

    void finish() const
    {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key))
                throw ConfigError(at(key), "is not a recognized field");
    }

  private:
    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& what)
{
    if (!ok)
        throw ConfigError(path, what);
}

//---------------------------------------------------------------------------//
// Spec parsing
//---------------------------------------------------------------------------//

GaugeSpec parse_gauge(const Json& j, const std::string& path)
{
    Reader r(j, path);
    GaugeSpec s;
    s.type = r.string("type", "lq");
    s.q = r.number("q", 1.0);
    s.matrix = r.rows("matrix");
    r.finish();
    require(s.type == "lq" || s.type == "linear_lq", r.at("type"), "must be \"lq\" or \"linear_lq\"");
    require(s.q >= 1.0, r.at("q"), "must be ≥ 1");
    return s;
}

void validate_gauge(const GaugeSpec& s, std::size_t N, const std::string& path)
{
    require(s.q >= 1.0, join(path, "q"), "must be ≥ 1");
    if (s.type == "linear_lq")
    {
        require(s.matrix.size() == N, join(path, "matrix"), "must be N x N");
        Matrix m(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
        for (std::size_t i = 0; i < N; ++i)
        {
            require(s.matrix[i].size() == N, join(path, "matrix"), "must be N x N");
            for (std::size_t k = 0; k < N; ++k)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = s.matrix[i][k];
        }
        Eigen::JacobiSVD<Matrix> svd(m);
        const auto& sv = svd.singularValues();
        require(sv(sv.size() - 1) > 1e-12 * std::max(sv(0), 1e-300), join(path, "matrix"),
                "must be invertible");
    }
}

MeasureSpec parse_measure(const Json& j, const std::string& path)
{
    Reader r(j, path);
    MeasureSpec s;
    s.kind = r.string("kind", "lebesgue_ball");
    s.R = r.number("R", kInfinity);
    s.sigma = r.number("sigma", 1.0);
    for (const auto& row : r.rows("k_table"))
    {
        require(row.size() == 2, r.at("k_table"), "rows must be [t, k(t)] pairs");
        s.k_table.emplace_back(row[0], row[1]);
    }
    r.finish();
    require(s.kind == "lebesgue_ball" || s.kind == "gaussian" || s.kind == "power_kernel",
            r.at("kind"), "must be one of lebesgue_ball, gaussian, power_kernel");
    require(s.R > 0.0, r.at("R"), "must be > 0");
    require(s.sigma > 0.0 && std::isfinite(s.sigma), r.at("sigma"), "must be positive and finite");
    if (s.kind == "power_kernel")
    {
        require(!s.k_table.empty(), r.at("k_table"), "must have at least one row");
        for (std::size_t i = 0; i < s.k_table.size(); ++i)
        {
            const auto [t, k] = s.k_table[i];
            require(t >= 0.0 && std::isfinite(t), r.at("k_table"), "abscissae must be finite and ≥ 0");
            require(k > 0.0 && std::isfinite(k), r.at("k_table"), "values must be positive and finite");
            if (i > 0)
            {
                require(t > s.k_table[i - 1].first, r.at("k_table"), "abscissae must increase");
                require(k >= s.k_table[i - 1].second, r.at("k_table"),
                        "k must be increasing (rho decreasing)");
            }
        }
    }
    return s;
}

DensitySpec parse_density(const Json& j, const std::string& path)
{
    Reader r(j, path);
    DensitySpec s;
    s.kind = r.string("kind", "uniform_cube");
    s.breaks = r.numbers("breaks", {});
    s.values = r.numbers("values", {});
    r.finish();
    require(s.kind == "uniform_cube" || s.kind == "uniform_Dn" || s.kind == "uniform_simplex"
                || s.kind == "radial_step",
            r.at("kind"), "must be one of uniform_cube, uniform_Dn, uniform_simplex, radial_step");
    return s;
}

void validate_density(const DensitySpec& s, std::size_t n, const std::string& path)
{
    if (s.kind != "radial_step")
        return;
    require(!s.breaks.empty() && s.breaks.size() == s.values.size(), join(path, "values"),
            "must have one value per break");
    for (double v : s.values)
    {
        require(v >= 0.0, join(path, "values"), "must be ≥ 0");
        require(v <= 1.0, join(path, "values"), "must be ≤ 1 (density exceeds 1)");
    }
    try
    {
        const RadialStepFn f(n, s.breaks, s.values);
        const double total = f.integral();
        require(std::abs(total - 1.0) <= 1e-9, path, "must integrate to 1 (got " + fmt(total) + ")");
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(join(path, "breaks"), e.what());
    }
}

BodySpec parse_body(const Json& j, const std::string& path)
{
    Reader r(j, path);
    BodySpec s;
    s.kind = r.string("kind", "matrix_image");
    s.columns = r.rows("columns");
    if (r.has("gauge"))
        s.gauge = parse_gauge(r.raw("gauge"), r.at("gauge"));
    s.r = r.number("r", 0.0);
    s.R = r.number("R", 1.0);
    s.normals = r.rows("normals");
    s.offsets = r.numbers("offsets", {});
    r.finish();
    require(s.kind == "matrix_image" || s.kind == "ball" || s.kind == "hpolytope", r.at("kind"),
            "must be one of matrix_image, ball, hpolytope");
    return s;
}

void validate_body(const BodySpec& s, std::size_t n, const std::string& path)
{
    if (s.kind == "ball")
    {
        require(s.R > 0.0 && std::isfinite(s.R), join(path, "R"), "must be positive and finite");
        return;
    }
    if (s.kind == "matrix_image")
    {
        require(!s.columns.empty(), join(path, "columns"), "must list at least one column");
        for (const auto& c : s.columns)
            require(c.size() == n, join(path, "columns"), "entries must have dimension " + std::to_string(n));
        require(s.r >= 0.0, join(path, "r"), "must be ≥ 0");
        validate_gauge(s.gauge, s.columns.size(), join(path, "gauge"));
        return;
    }
    require(!s.normals.empty() && s.normals.size() == s.offsets.size(), join(path, "offsets"),
            "must have one offset per normal");
    for (const auto& a : s.normals)
        require(a.size() == n, join(path, "normals"), "entries must have dimension " + std::to_string(n));
    for (double b : s.offsets)
        require(b > 0.0, join(path, "offsets"), "must be > 0 (origin in the interior)");
    require(n <= 3, join(path, "kind"), "hpolytope bodies need n ≤ 3");
}

Vector to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> condnu2_grid(const MeasureSpec& s)
{
    double top = 10.0;
    if (s.kind == "lebesgue_ball" && std::isfinite(s.R))
        top = 2.0 * s.R;
    else if (s.kind == "gaussian")
        top = 10.0 * s.sigma;
    else if (s.kind == "power_kernel")
        top = 2.0 * s.k_table.back().first + 10.0;
    std::vector<double> grid(401);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = top * static_cast<double>(i) / 400.0;
    return grid;
}

bool exact_available(const ExperimentConfig& c)
{
    return c.gauge.type == "lq" && c.gauge.q == 1.0 && c.rball == 0.0
           && c.measure.kind == "lebesgue_ball"
           && (c.n <= 2 || (c.n == 3 && std::isinf(c.measure.R)));
}

}  // namespace

//---------------------------------------------------------------------------//
// Builders
//---------------------------------------------------------------------------//

CoefficientGauge GaugeSpec::build(std::size_t N) const
{
    if (type == "lq")
        return CoefficientGauge::lq(N, q);
    if (type != "linear_lq")
        throw std::invalid_argument("unknown gauge type " + type);
    if (matrix.size() != N)
        throw std::invalid_argument("gauge matrix must be N x N");
    Matrix m(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i < N; ++i)
    {
        if (matrix[i].size() != N)
            throw std::invalid_argument("gauge matrix must be N x N");
        for (std::size_t k = 0; k < N; ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = matrix[i][k];
    }
    const Matrix inv = m.inverse();
    const Matrix mt = m.transpose();
    const double qq = q;
    const double dq = dual_exponent(q);
    return CoefficientGauge::oracle(
        N, [inv, qq](const Vector& u) { return lq_norm(inv * u, qq); },
        [mt, dq](const Vector& u) { return lq_norm(mt * u, dq); }, unconditional(), true,
        "linear_lq");
}

bool GaugeSpec::unconditional() const
{
    if (type == "lq")
        return true;
    // M B_q^N is unconditional when M is a scaled permutation.
    for (std::size_t i = 0; i < matrix.size(); ++i)
    {
        std::size_t row_nz = 0, col_nz = 0;
        for (std::size_t k = 0; k < matrix.size(); ++k)
        {
            row_nz += matrix[i][k] != 0.0;
            col_nz += matrix[k][i] != 0.0;
        }
        if (row_nz != 1 || col_nz != 1)
            return false;
    }
    return true;
}

RadialMeasure MeasureSpec::build(std::size_t n) const
{
    if (kind == "lebesgue_ball")
        return RadialMeasure::lebesgue(n, R);
    if (kind == "gaussian")
        return RadialMeasure::gaussian(n, sigma);
    std::vector<double> t, k;
    for (const auto& [a, b] : k_table)
    {
        t.push_back(a);
        k.push_back(b);
    }
    return RadialMeasure::power_kernel(n, std::move(t), std::move(k));
}

PnDensity DensitySpec::build(std::size_t n) const
{
    if (kind == "uniform_cube")
        return PnDensity::uniform_cube(n);
    if (kind == "uniform_Dn")
        return PnDensity::uniform_Dn(n);
    if (kind == "uniform_simplex")
        return PnDensity::uniform_simplex(n);
    return PnDensity::radial_step(RadialStepFn(n, breaks, values));
}

std::size_t BodySpec::dim() const
{
    if (kind == "matrix_image" && !columns.empty())
        return columns.front().size();
    if (kind == "hpolytope" && !normals.empty())
        return normals.front().size();
    return 0;
}

Body BodySpec::build(std::size_t n) const
{
    if (kind == "ball")
        return Body::ball(n, R);
    if (kind == "matrix_image")
    {
        Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
        for (std::size_t j = 0; j < columns.size(); ++j)
            a.col(static_cast<Eigen::Index>(j)) = to_vector(columns[j]);
        return Body::matrix_image(std::move(a), gauge.build(columns.size()), r);
    }
    std::vector<Vector> normals_v;
    for (const auto& a : normals)
        normals_v.push_back(to_vector(a));
    return Body::hpolytope(std::move(normals_v), offsets);
}

std::string to_string(Mode m)
{
    switch (m)
    {
    case Mode::expectation: return "expectation";
    case Mode::dominance: return "dominance";
    case Mode::convergence: return "convergence";
    case Mode::centroid: return "centroid";
    case Mode::newsan: return "newsan";
    }
    return "expectation";
}

//---------------------------------------------------------------------------//
// Serialization
//---------------------------------------------------------------------------//

Json to_json(const GaugeSpec& s)
{
    Json j{{"type", s.type}, {"q", number_json(s.q)}};
    if (s.type == "linear_lq")
        j["matrix"] = s.matrix;
    return j;
}

Json to_json(const MeasureSpec& s)
{
    Json j{{"kind", s.kind}};
    if (s.kind == "lebesgue_ball")
        j["R"] = number_json(s.R);
    else if (s.kind == "gaussian")
        j["sigma"] = s.sigma;
    else
    {
        Json rows = Json::array();
        for (const auto& [t, k] : s.k_table)
            rows.push_back({t, k});
        j["k_table"] = rows;
    }
    return j;
}

Json to_json(const DensitySpec& s)
{
    Json j{{"kind", s.kind}};
    if (s.kind == "radial_step")
    {
        j["breaks"] = s.breaks;
        j["values"] = s.values;
    }
    return j;
}

Json to_json(const BodySpec& s)
{
    Json j{{"kind", s.kind}};
    if (s.kind == "ball")
        j["R"] = s.R;
    else if (s.kind == "matrix_image")
    {
        j["columns"] = s.columns;
        j["gauge"] = to_json(s.gauge);
        j["r"] = s.r;
    }
    else
    {
        j["normals"] = s.normals;
        j["offsets"] = s.offsets;
    }
    return j;
}

Json to_json(const ExperimentConfig& c)
{
    Json j{{"mode", to_string(c.mode)},
           {"n", c.n},
           {"N", c.N},
           {"gauge", to_json(c.gauge)},
           {"rball", c.rball},
           {"lawX", to_json(c.lawX)},
           {"measure", to_json(c.measure)},
           {"trials", c.trials},
           {"budgetPerTrial", c.budgetPerTrial},
           {"seed", c.seed},
           {"estimator", c.estimator},
           {"threeWay", c.threeWay},
           {"survivalLevels", c.survivalLevels},
           {"schedule", c.schedule},
           {"band", c.band},
           {"p", c.p},
           {"body", to_json(c.body)}};
    return j;
}

//---------------------------------------------------------------------------//
// Experiment configs
//---------------------------------------------------------------------------//

ExperimentConfig experiment_config_from_json(const Json& j)
{
    Reader r(j, "");
    ExperimentConfig c;
    const std::string mode = r.string("mode", "expectation");
    if (mode == "expectation")
        c.mode = Mode::expectation;
    else if (mode == "dominance")
        c.mode = Mode::dominance;
    else if (mode == "convergence")
        c.mode = Mode::convergence;
    else if (mode == "centroid")
        c.mode = Mode::centroid;
    else if (mode == "newsan")
        c.mode = Mode::newsan;
    else
        throw ConfigError("mode", "must be one of expectation, dominance, convergence, centroid, newsan");

    c.n = r.count("n", c.n);
    c.N = r.count("N", c.N);
    if (r.has("gauge"))
        c.gauge = parse_gauge(r.raw("gauge"), "gauge");
    c.rball = r.number("rball", c.rball);
    if (r.has("lawX"))
        c.lawX = parse_density(r.raw("lawX"), "lawX");
    if (r.has("measure"))
        c.measure = parse_measure(r.raw("measure"), "measure");
    c.trials = r.count("trials", c.trials);
    c.budgetPerTrial = r.count("budgetPerTrial", c.budgetPerTrial);
    c.seed = r.count("seed", c.seed);
    c.estimator = r.string("estimator", c.estimator);
    c.threeWay = r.boolean("threeWay", c.threeWay);
    c.survivalLevels = r.count("survivalLevels", c.survivalLevels);
    if (r.has("schedule"))
    {
        const Json& s = r.raw("schedule");
        require(s.is_array(), "schedule", "must be an array of integers");
        c.schedule.clear();
        for (std::size_t i = 0; i < s.size(); ++i)
            c.schedule.push_back(as_count(s[i], "schedule[" + std::to_string(i) + "]"));
    }
    c.band = r.number("band", c.band);
    c.p = r.number("p", c.p);
    if (r.has("body"))
        c.body = parse_body(r.raw("body"), "body");
    r.finish();
    validate(c);
    return c;
}

ExperimentConfig parse_experiment_config(const std::string& text)
{
    Json j;
    try
    {
        j = Json::parse(text);
    }
    catch (const Json::parse_error& e)
    {
        throw ConfigError("config", std::string("is not valid JSON: ") + e.what());
    }
    return experiment_config_from_json(j);
}

void validate(const ExperimentConfig& c)
{
    require(c.n >= 1, "n", "must be ≥ 1");
    require(c.N >= 1, "N", "must be ≥ 1");
    validate_gauge(c.gauge, c.N, "gauge");
    require(c.rball >= 0.0 && std::isfinite(c.rball), "rball", "must be finite and ≥ 0");
    validate_density(c.lawX, c.n, "lawX");
    require(c.budgetPerTrial >= 1, "budgetPerTrial", "must be ≥ 1");
    require(c.estimator == "mc" || c.estimator == "exact", "estimator", "must be \"mc\" or \"exact\"");

    const bool paired = c.mode == Mode::expectation || c.mode == Mode::dominance;
    if (paired)
    {
        require(c.trials >= 2, "trials", "must be ≥ 2");
        require(c.gauge.unconditional(), "gauge",
                "must be unconditional for expectation and dominance experiments");
        if (c.estimator == "exact")
            require(exact_available(c), "estimator",
                    "exact needs gauge lq with q = 1, rball = 0 and a Lebesgue measure (n ≤ 2, or n = 3 with R = inf)");
    }
    if (c.mode == Mode::dominance)
    {
        require(c.survivalLevels >= 2, "survivalLevels", "must be ≥ 2");
        const auto check = check_condnu2(c.measure.build(c.n), condnu2_grid(c.measure));
        require(check.decreasing, "measure", "must have a decreasing density");
        require(check.condnu2, "measure",
                "fails condnu2: rho^{-1/(n+1)} is not convex, required for dominance");
    }
    if (c.mode == Mode::convergence)
    {
        require(c.measure.kind == "lebesgue_ball", "measure",
                "convergence uses the exact oracle and needs a Lebesgue measure");
        require(c.n <= 3, "n", "exact oracle is only available for n ≤ 3");
        require(c.n <= 2 || std::isinf(c.measure.R), "measure.R", "must be inf when n = 3");
        require(!c.schedule.empty(), "schedule", "must be nonempty");
        require(c.schedule.front() >= c.n, "schedule", "must start at N ≥ n");
        for (std::size_t i = 1; i < c.schedule.size(); ++i)
            require(c.schedule[i] > c.schedule[i - 1], "schedule", "must be strictly increasing");
        require(c.band > 0.0, "band", "must be > 0");
    }
    if (c.mode == Mode::centroid)
    {
        require(c.p >= 1.0 && std::isfinite(c.p), "p", "must be finite and ≥ 1");
        require(c.n <= 3, "n", "centroid experiments need n ≤ 3");
    }
    if (c.mode == Mode::newsan)
    {
        require(c.n <= 3, "n", "newsan experiments need n ≤ 3");
        validate_body(c.body, c.n, "body");
        try
        {
            const Body b = c.body.build(c.n);
            require(b.symmetric(), "body", "must be origin-symmetric");
        }
        catch (const std::invalid_argument& e)
        {
            throw ConfigError("body", e.what());
        }
    }
}

//---------------------------------------------------------------------------//
// Other command configs
//---------------------------------------------------------------------------//

DensityOracle density_oracle(const std::string& name, std::size_t n)
{
    if (name == "gaussian")
        return DensityOracle::gaussian_factor(n, 1.0);
    if (name == "square")
        return DensityOracle::cube_indicator(n, 1.0);
    if (name == "disk")
        return DensityOracle::ball_indicator(n, 1.0);
    throw std::invalid_argument("unknown density " + name);
}

BrunnOracle brunn_oracle(const std::string& name, std::size_t n)
{
    if (name == "hyperbolic")
        return BrunnOracle::hyperbolic(n);
    if (name == "exp_abs")
        return BrunnOracle::exp_abs(n);
    if (name == "constant")
        return BrunnOracle::constant(n);
    throw std::invalid_argument("unknown phi " + name);
}

PolarVolumeConfig polar_volume_config_from_json(const Json& j)
{
    Reader r(j, "");
    PolarVolumeConfig c;
    c.body = parse_body(r.raw("body"), "body");
    if (r.has("measure"))
        c.measure = parse_measure(r.raw("measure"), "measure");
    const std::size_t implied = c.body.dim();
    c.n = r.count("n", implied ? implied : 2);
    c.budget = r.count("budget", c.budget);
    c.seed = r.count("seed", c.seed);
    c.estimator = r.string("estimator", c.estimator);
    c.levels = r.count("levels", c.levels);
    r.finish();
    require(c.n >= 1, "n", "must be ≥ 1");
    require(implied == 0 || implied == c.n, "n", "does not match the body dimension");
    validate_body(c.body, c.n, "body");
    require(c.budget >= 1, "budget", "must be ≥ 1");
    require(c.estimator == "mc" || c.estimator == "exact" || c.estimator == "layer_cake",
            "estimator", "must be one of mc, exact, layer_cake");
    require(c.levels >= 1, "levels", "must be ≥ 1");
    return c;
}

Json to_json(const PolarVolumeConfig& c)
{
    return {{"body", to_json(c.body)}, {"measure", to_json(c.measure)}, {"n", c.n},
            {"budget", c.budget},       {"seed", c.seed},                {"estimator", c.estimator},
            {"levels", c.levels}};
}

ShadowRunConfig shadow_config_from_json(const Json& j)
{
    Reader r(j, "");
    ShadowRunConfig c;
    c.theta = r.numbers("theta");
    c.base = r.rows("base");
    c.direction = r.numbers("direction");
    c.tGrid = r.numbers("tGrid");
    if (r.has("gauge"))
        c.gauge = parse_gauge(r.raw("gauge"), "gauge");
    c.rball = r.number("rball", 0.0);
    if (r.has("measure"))
        c.measure = parse_measure(r.raw("measure"), "measure");
    c.budget = r.count("budget", c.budget);
    c.seed = r.count("seed", c.seed);
    c.estimator = r.string("estimator", c.estimator);
    r.finish();

    const std::size_t n = c.theta.size();
    require(n >= 1, "theta", "must be nonempty");
    require(!c.base.empty(), "base", "must list at least one position");
    for (const auto& y : c.base)
        require(y.size() == n, "base", "entries must have the dimension of theta");
    require(c.direction.size() == c.base.size(), "direction", "must have one entry per base position");
    require(c.tGrid.size() >= 3, "tGrid", "must have at least 3 points");
    validate_gauge(c.gauge, c.base.size(), "gauge");
    require(c.rball >= 0.0, "rball", "must be ≥ 0");
    require(c.estimator == "auto" || c.estimator == "exact" || c.estimator == "mc", "estimator",
            "must be one of auto, exact, mc");
    try
    {
        validate_shadow_config(build_shadow_config(c));
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError("config", e.what());
    }
    return c;
}

Json to_json(const ShadowRunConfig& c)
{
    return {{"theta", c.theta},
            {"base", c.base},
            {"direction", c.direction},
            {"tGrid", c.tGrid},
            {"gauge", to_json(c.gauge)},
            {"rball", c.rball},
            {"measure", to_json(c.measure)},
            {"budget", c.budget},
            {"seed", c.seed},
            {"estimator", c.estimator}};
}

ShadowConfig build_shadow_config(const ShadowRunConfig& c)
{
    std::vector<Vector> base;
    for (const auto& y : c.base)
        base.push_back(to_vector(y));
    return ShadowConfig{to_vector(c.theta), std::move(base), c.gauge.build(c.base.size()),
                        c.rball, c.measure.build(c.theta.size())};
}

BusemannConfig busemann_config_from_json(const Json& j)
{
    Reader r(j, "");
    BusemannConfig c;
    c.density = r.string("density", c.density);
    c.n = r.count("n", c.n);
    c.pairs = r.count("pairs", c.pairs);
    c.seed = r.count("seed", c.seed);
    c.segments = r.count("segments", c.segments);
    r.finish();
    require(c.density == "gaussian" || c.density == "square" || c.density == "disk", "density",
            "must be one of gaussian, square, disk");
    require(c.n == 2 || c.n == 3, "n", "must be 2 or 3");
    require(c.pairs >= 1, "pairs", "must be ≥ 1");
    return c;
}

Json to_json(const BusemannConfig& c)
{
    return {{"density", c.density}, {"n", c.n}, {"pairs", c.pairs}, {"seed", c.seed},
            {"segments", c.segments}};
}

GaugeRunConfig gauge_config_from_json(const Json& j)
{
    Reader r(j, "");
    GaugeRunConfig c;
    c.gauge = r.string("gauge", c.gauge);
    c.density = r.string("density", c.density);
    c.n = r.count("n", c.n);
    c.p = r.number("p", c.p);
    c.subspace = r.rows("subspace");
    c.samples = r.count("samples", c.samples);
    c.seed = r.count("seed", c.seed);
    r.finish();
    require(c.gauge == "ball_bobkov" || c.gauge == "milman_pajor", "gauge",
            "must be \"ball_bobkov\" or \"milman_pajor\"");
    require(c.density == "gaussian" || c.density == "square" || c.density == "disk", "density",
            "must be one of gaussian, square, disk");
    require(c.n >= 1 && c.n <= 3, "n", "must be 1, 2 or 3");
    require(c.p > 0.0 && std::isfinite(c.p), "p", "must be positive and finite");
    require(c.subspace.size() < c.n, "subspace", "must be a proper subspace");
    for (const auto& e : c.subspace)
        require(e.size() == c.n, "subspace", "vectors must have dimension n");
    require(c.samples >= 1, "samples", "must be ≥ 1");
    return c;
}

Json to_json(const GaugeRunConfig& c)
{
    return {{"gauge", c.gauge}, {"density", c.density}, {"n", c.n},       {"p", c.p},
            {"subspace", c.subspace}, {"samples", c.samples}, {"seed", c.seed}};
}

BrunnConfig brunn_config_from_json(const Json& j)
{
    Reader r(j, "");
    BrunnConfig c;
    c.phi = r.string("phi", c.phi);
    c.n = r.count("n", c.n);
    c.alpha = r.number("alpha", c.alpha);
    c.tGrid = r.numbers("tGrid", c.tGrid);
    r.finish();
    require(c.phi == "hyperbolic" || c.phi == "exp_abs" || c.phi == "constant", "phi",
            "must be one of hyperbolic, exp_abs, constant");
    require(c.n == 1 || c.n == 2, "n", "must be 1 or 2");
    require(c.alpha > 0.0 && std::isfinite(c.alpha), "alpha", "must be positive and finite");
    require(c.tGrid.size() >= 3 && std::is_sorted(c.tGrid.begin(), c.tGrid.end()), "tGrid",
            "must be sorted with at least 3 points");
    return c;
}

Json to_json(const BrunnConfig& c)
{
    return {{"phi", c.phi}, {"n", c.n}, {"alpha", c.alpha}, {"tGrid", c.tGrid}};
}

RbllConfig rbll_config_from_json(const Json& j)
{
    Reader r(j, "");
    RbllConfig c;
    c.family = r.string("family", c.family);
    c.tolerance = r.number("tolerance", c.tolerance);
    if (r.has("cases"))
    {
        const Json& a = r.raw("cases");
        require(a.is_array(), "cases", "must be an array");
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            const std::string path = "cases[" + std::to_string(i) + "]";
            Reader cr(a[i], path);
            RbllCaseSpec s;
            const Json& fns = cr.raw("functions");
            require(fns.is_array() && !fns.empty() && fns.size() <= 3, cr.at("functions"),
                    "must list 1 to 3 step functions");
            for (std::size_t f = 0; f < fns.size(); ++f)
            {
                const std::string fpath = cr.at("functions") + "[" + std::to_string(f) + "]";
                require(fns[f].is_array(), fpath, "must be an array of [lo, hi, value] pieces");
                std::vector<std::array<double, 3>> pieces;
                for (std::size_t k = 0; k < fns[f].size(); ++k)
                {
                    const auto row = Reader::numbers_of(fns[f][k], fpath + "[" + std::to_string(k) + "]");
                    require(row.size() == 3, fpath, "pieces must be [lo, hi, value]");
                    pieces.push_back({row[0], row[1], row[2]});
                }
                s.functions.push_back(std::move(pieces));
            }
            s.coeffs = cr.rows("coeffs");
            s.halfWidth = cr.number("halfWidth", 3.0);
            cr.finish();
            require(s.coeffs.size() == s.functions.size(), cr.at("coeffs"),
                    "must have one row per function");
            for (const auto& row : s.coeffs)
                require(!row.empty() && row.size() <= 3 && row.size() == s.coeffs.front().size(),
                        cr.at("coeffs"), "rows must have the same length N in 1..3");
            require(s.halfWidth > 0.0 && std::isfinite(s.halfWidth), cr.at("halfWidth"),
                    "must be positive and finite");
            c.cases.push_back(std::move(s));
        }
    }
    r.finish();
    require(c.family == "exhaustive" || c.family == "explicit", "family",
            "must be \"exhaustive\" or \"explicit\"");
    require(c.family == "exhaustive" || !c.cases.empty(), "cases",
            "must be nonempty for the explicit family");
    require(c.tolerance >= 0.0, "tolerance", "must be ≥ 0");
    try
    {
        build_rbll_cases(c);
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError("cases", e.what());
    }
    return c;
}

Json to_json(const RbllConfig& c)
{
    Json cases = Json::array();
    for (const auto& s : c.cases)
        cases.push_back({{"functions", s.functions}, {"coeffs", s.coeffs}, {"halfWidth", s.halfWidth}});
    return {{"family", c.family}, {"cases", cases}, {"tolerance", c.tolerance}};
}

std::vector<RbllCase> build_rbll_cases(const RbllConfig& c)
{
    if (c.family == "exhaustive")
        return rbll_exhaustive_family();
    std::vector<RbllCase> out;
    for (const auto& s : c.cases)
    {
        RbllCase rc;
        for (const auto& f : s.functions)
        {
            std::vector<StepFn1d::Piece> pieces;
            for (const auto& p : f)
                pieces.push_back({p[0], p[1], p[2]});
            rc.g.emplace_back(std::move(pieces));
        }
        rc.coeffs.resize(static_cast<Eigen::Index>(s.coeffs.size()),
                         static_cast<Eigen::Index>(s.coeffs.front().size()));
        for (std::size_t i = 0; i < s.coeffs.size(); ++i)
            for (std::size_t k = 0; k < s.coeffs[i].size(); ++k)
                rc.coeffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = s.coeffs[i][k];
        rc.half_width = s.halfWidth;
        out.push_back(std::move(rc));
    }
    return out;
}

}  // namespace randpolar
