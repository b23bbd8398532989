#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "randpolar/analysis.hpp"
#include "randpolar/geom.hpp"
#include "randpolar/measure.hpp"

namespace randpolar
{

using Json = nlohmann::json;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/*!
 * Declarative descriptions of the library objects, as they appear in JSON
 * configs. Each spec validates and builds its object; parse(serialize(x)) == x.
 */
struct GaugeSpec
{
    // "lq": B_q^N. "linear_lq": M B_q^N for an invertible N x N matrix M.
    std::string type = "lq";
    double q = 1.0;
    std::vector<std::vector<double>> matrix;  // rows of M

    CoefficientGauge build(std::size_t N) const;
    bool unconditional() const;
    friend bool operator==(const GaugeSpec&, const GaugeSpec&) = default;
};

struct MeasureSpec
{
    std::string kind = "lebesgue_ball";  // lebesgue_ball | gaussian | power_kernel
    double R = kInfinity;
    double sigma = 1.0;
    std::vector<std::pair<double, double>> k_table;

    RadialMeasure build(std::size_t n) const;
    friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;
};

struct DensitySpec
{
    std::string kind = "uniform_cube";  // uniform_cube | uniform_Dn | uniform_simplex | radial_step
    std::vector<double> breaks;
    std::vector<double> values;

    PnDensity build(std::size_t n) const;
    friend bool operator==(const DensitySpec&, const DensitySpec&) = default;
};

struct BodySpec
{
    std::string kind = "matrix_image";  // matrix_image | ball | hpolytope
    std::vector<std::vector<double>> columns;
    GaugeSpec gauge;
    double r = 0.0;
    double R = 1.0;
    std::vector<std::vector<double>> normals;
    std::vector<double> offsets;

    // Dimension implied by the data.
    std::size_t dim() const;
    Body build(std::size_t n) const;
    friend bool operator==(const BodySpec&, const BodySpec&) = default;
};

enum class Mode
{
    expectation,
    dominance,
    convergence,
    centroid,
    newsan
};

std::string to_string(Mode m);

/*!
 * Experiment description shared by the santalo, dominance, converge,
 * centroid and newsan commands. Unused fields keep their defaults.
 */
struct ExperimentConfig
{
    Mode mode = Mode::expectation;
    std::size_t n = 2;
    std::size_t N = 4;
    GaugeSpec gauge;
    double rball = 0.0;
    DensitySpec lawX;
    MeasureSpec measure{"lebesgue_ball", 5.0, 1.0, {}};
    std::uint64_t trials = 200;
    std::uint64_t budgetPerTrial = 100000;
    std::uint64_t seed = 1;
    std::string estimator = "mc";  // mc | exact
    bool threeWay = false;          // add the rearranged-lawX side
    std::size_t survivalLevels = 50;
    std::vector<std::size_t> schedule{4, 8, 16, 32, 64, 128, 256, 512};
    double band = 0.05;
    double p = 1.0;
    BodySpec body;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Parses and fully validates; throws ConfigError with a field path.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig experiment_config_from_json(const Json& j);
Json to_json(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

// Convex-measure test densities by name: "gaussian", "square" (indicator of
// [-1,1]^2 or [-1,1]^3), "disk" (unit ball indicator).
DensityOracle density_oracle(const std::string& name, std::size_t n);
BrunnOracle brunn_oracle(const std::string& name, std::size_t n);

struct PolarVolumeConfig
{
    BodySpec body;
    MeasureSpec measure;
    std::size_t n = 2;
    std::uint64_t budget = 1000000;
    std::uint64_t seed = 1;
    std::string estimator = "mc";  // mc | exact | layer_cake
    std::size_t levels = 64;

    friend bool operator==(const PolarVolumeConfig&, const PolarVolumeConfig&) = default;
};

struct ShadowRunConfig
{
    std::vector<double> theta;
    std::vector<std::vector<double>> base;
    std::vector<double> direction;
    std::vector<double> tGrid;
    GaugeSpec gauge;
    double rball = 0.0;
    MeasureSpec measure;
    std::uint64_t budget = 200000;
    std::uint64_t seed = 1;
    std::string estimator = "auto";  // auto | exact | mc

    friend bool operator==(const ShadowRunConfig&, const ShadowRunConfig&) = default;
};

struct BusemannConfig
{
    std::string density = "square";
    std::size_t n = 2;
    std::size_t pairs = 200;
    std::uint64_t seed = 1;
    std::size_t segments = 50;

    friend bool operator==(const BusemannConfig&, const BusemannConfig&) = default;
};

struct GaugeRunConfig
{
    std::string gauge = "ball_bobkov";  // ball_bobkov | milman_pajor
    std::string density = "gaussian";
    std::size_t n = 2;
    double p = 1.0;
    std::vector<std::vector<double>> subspace;  // milman_pajor only
    std::size_t samples = 100;
    std::uint64_t seed = 1;

    friend bool operator==(const GaugeRunConfig&, const GaugeRunConfig&) = default;
};

struct BrunnConfig
{
    std::string phi = "hyperbolic";  // hyperbolic | exp_abs | constant
    std::size_t n = 1;
    double alpha = 1.0;
    std::vector<double> tGrid{-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};

    friend bool operator==(const BrunnConfig&, const BrunnConfig&) = default;
};

struct RbllCaseSpec
{
    std::vector<std::vector<std::array<double, 3>>> functions;  // pieces (lo, hi, value)
    std::vector<std::vector<double>> coeffs;                   // k rows of N entries
    double halfWidth = 3.0;

    friend bool operator==(const RbllCaseSpec&, const RbllCaseSpec&) = default;
};

struct RbllConfig
{
    std::string family = "exhaustive";  // exhaustive | explicit
    std::vector<RbllCaseSpec> cases;
    double tolerance = 1e-9;

    friend bool operator==(const RbllConfig&, const RbllConfig&) = default;
};

PolarVolumeConfig polar_volume_config_from_json(const Json& j);
ShadowRunConfig shadow_config_from_json(const Json& j);
BusemannConfig busemann_config_from_json(const Json& j);
GaugeRunConfig gauge_config_from_json(const Json& j);
BrunnConfig brunn_config_from_json(const Json& j);
RbllConfig rbll_config_from_json(const Json& j);

Json to_json(const PolarVolumeConfig& c);
Json to_json(const ShadowRunConfig& c);
Json to_json(const BusemannConfig& c);
Json to_json(const GaugeRunConfig& c);
Json to_json(const BrunnConfig& c);
Json to_json(const RbllConfig& c);

Json to_json(const GaugeSpec& s);
Json to_json(const MeasureSpec& s);
Json to_json(const DensitySpec& s);
Json to_json(const BodySpec& s);

// Builds the shadow configuration; the measure and gauge are constructed.
ShadowConfig build_shadow_config(const ShadowRunConfig& c);
std::vector<RbllCase> build_rbll_cases(const RbllConfig& c);

}  // namespace randpolar
