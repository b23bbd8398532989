#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "randpolar/geom.hpp"
#include "randpolar/measure.hpp"
#include "randpolar/rng.hpp"

namespace randpolar
{

// Monte Carlo result; std_error is the sample standard deviation of the
// per-point estimator divided by sqrt(samples).
struct Estimate
{
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t streams = 0;

    friend bool operator==(const Estimate&, const Estimate&) = default;
};

void to_json(nlohmann::json& j, const Estimate& e);

// Welford accumulator with Chan's pairwise merge.
class RunningStats
{
  public:
    void add(double x) noexcept
    {
        ++count_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(count_);
        m2_ += d * (x - mean_);
    }
    void merge(const RunningStats& other) noexcept;

    std::uint64_t count() const noexcept { return count_; }
    double mean() const noexcept { return mean_; }
    // Unbiased sample variance (0 for fewer than two points).
    double variance() const noexcept;
    double std_error() const noexcept;

  private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Samples per chunk; chunk k always draws from rng.substream(k).
inline constexpr std::uint64_t kChunkSize = 1u << 16;

/*!
 * Monte Carlo estimate of nu(K°).
 *
 * With a finite sampling radius R* (rigorous bound on K°, or the support of
 * nu), points are uniform in R* B and the per-point value is
 * |R* B| rho(|Y|) 1{Y in K°}. Otherwise, for finite-mass nu, Y ~ nu / nu(R^n)
 * and the value is nu(R^n) 1{Y in K°}. Throws InfeasibleError when neither
 * applies. `threads` changes speed only.
 */
Estimate mc_polar_measure(const Body& body, const RadialMeasure& m, std::uint64_t budget,
                          RngStream rng, unsigned threads = 1);

struct LayerCakeResult
{
    Estimate estimate;
    std::vector<double> levels;
    bool low_accuracy = false;
};

// Geometric levels rho(0) * ratio^{i/(count-1)}, i = 0..count-1, ascending.
std::vector<double> default_level_grid(const RadialMeasure& m, std::size_t count = 64,
                                       double ratio = 1e-6);

/*!
 * nu(K°) = integral over t in [0, rho(0)] of |K° ∩ R(t) B| with R(t) the
 * level radius, by the trapezoid rule on the level grid (the integrand is
 * held constant below the smallest level). All levels share one set of
 * uniform sample points. A single level is flagged low-accuracy.
 */
LayerCakeResult layer_cake_measure(const Body& body, const RadialMeasure& m,
                                   std::vector<double> levels, std::uint64_t budget,
                                   RngStream rng, unsigned threads = 1);

/*!
 * Exact |{y : |<x_i, y>| <= 1 for all i}|, n in {1, 2, 3}. n = 2 clips a
 * bounding square and applies the shoelace formula; n = 3 clips a bounding
 * cube face by face. Throws InfeasibleError if the points do not span R^n.
 */
double exact_polar_volume_crosspoly(std::span<const Vector> points, std::size_t n);

// The same volume through exhaustive vertex enumeration and facet assembly
// (n in {2, 3}); slower, kept as an independent route.
double exact_polar_volume_crosspoly_enum(std::span<const Vector> points, std::size_t n);

// Exact |polar ∩ R B| of the symmetric hull of the points: n = 1, 2 for any
// R in (0, +inf], n = 3 only for R = +inf. Degenerate point sets are fine
// when R is finite.
double exact_polar_measure_crosspoly(std::span<const Vector> points, std::size_t n,
                                     double radius);

// Exact |{y : <v, y> <= 1 for all v} ∩ R B|, same coverage as above. The
// polar must be bounded unless R is finite.
double exact_polar_measure_vertices(std::span<const Vector> vertices, std::size_t n,
                                    double radius);

// Exact nu(K°) where available: any ball; B_1^N matrix images with r = 0 and
// H-polytopes with known vertices under Lebesgue measure (n <= 2 with finite
// R, n <= 3 with R = +inf). nullopt otherwise.
std::optional<double> exact_polar_measure(const Body& body, const RadialMeasure& m);

}  // namespace randpolar
