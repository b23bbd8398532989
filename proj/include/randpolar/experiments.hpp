#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "randpolar/config.hpp"
#include "randpolar/geom.hpp"
#include "randpolar/measure.hpp"

namespace randpolar
{

struct TrialRow
{
    std::uint64_t index = 0;
    std::string side;  // "X", "Z" or "R" (rearranged law)
    double value = 0.0;
    double std_error = 0.0;
};

/*!
 * Full record of one run. The verdict is recomputable from `summary`, and
 * `work` holds deterministic effort counters (wall-clock time is reported
 * separately so that reports stay byte-identical across runs).
 */
struct ExperimentReport
{
    std::string command;
    Json config;
    bool pass = false;
    Json summary = Json::object();
    Json work = Json::object();
    std::vector<TrialRow> trials;
    std::map<std::string, std::string> extra_csv;  // file name -> contents

    std::string verdict() const { return pass ? "PASS" : "FAIL"; }
    // {command, config, verdict, summary, timing}
    Json to_json() const;
    // "trial_index,side,value,stderr" rows.
    std::string trials_csv() const;
};

struct SideValues
{
    std::vector<double> value;
    std::vector<double> std_error;
};

struct PairedTrials
{
    SideValues x;
    SideValues z;
    std::optional<SideValues> rearranged;
    std::uint64_t mc_samples = 0;
};

/*!
 * Independent trials of nu(([X_1 ... X_N] C + r B)°) with X_i ~ lawX, and
 * the same with Z_i uniform on D_n. Side s in {X = 1, Z = 2, R = 3} uses
 * stream (seed, s); trial i draws its points from substream(i).substream(0)
 * and its estimate from substream(i).substream(1). Results do not depend on
 * `threads`.
 */
PairedTrials run_paired_trials(const ExperimentConfig& cfg, unsigned threads = 1);

// PASS iff mean_Z - mean_X >= -3 combined stderr (and, with the rearranged
// side, mean_X <= mean_R and mean_R <= mean_Z within the same margin).
ExperimentReport summarize_expectation(const ExperimentConfig& cfg, const PairedTrials& t);

// Survival curves on a shared grid of survivalLevels points spanning the
// observed values; PASS iff S_X <= S_Z + 3 binomial SE everywhere.
ExperimentReport summarize_dominance(const ExperimentConfig& cfg, const PairedTrials& t);

ExperimentReport santalo_expectation_experiment(const ExperimentConfig& cfg, unsigned threads = 1);
ExperimentReport stochastic_dominance_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

/*!
 * One seeded path Z_1, Z_2, ... uniform on D_n; exact nu of the polar of
 * conv{±Z_1, ..., ±Z_N} along the schedule, computed by clipping one
 * polygon/polyhedron incrementally so that set inclusion carries over to the
 * computed values. PASS iff the path is nonincreasing, the last value is
 * within `band` (relative) of nu(D_n°), and volume gaps correlate positively
 * with Hausdorff distances.
 */
ExperimentReport convergence_experiment(const ExperimentConfig& cfg);

// h_{Z_p(mu)}(y) = (integral |<x, y>|^p dmu)^{1/p}; closed form for radial
// laws, quadrature for the cube (n <= 3) and simplex (n <= 2).
double centroid_support(const PnDensity& mu, double p, const Vector& y);

// nu(Z_p(mu)°) as the sphere average of nu(R B) at R = 1 / h(theta):
// exact for radial laws, quadrature over the circle for n <= 2, and
// `directions` uniform sphere points for n = 3.
struct CentroidPolar
{
    double value = 0.0;
    double std_error = 0.0;
    std::string method;
};
CentroidPolar centroid_polar_measure(const PnDensity& mu, double p, const RadialMeasure& m,
                                     std::uint64_t directions, RngStream rng,
                                     unsigned threads = 1);

ExperimentReport centroid_polar_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

// nu(K°) <= nu((t_K B)°) with |t_K B| = |K|.
ExperimentReport newsan_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

// Dispatch on cfg.mode.
ExperimentReport run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

// Spearman rank correlation with average ranks for ties; 0 if degenerate.
double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace randpolar
