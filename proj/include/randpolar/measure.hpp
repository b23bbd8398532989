#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "randpolar/geom.hpp"
#include "randpolar/rng.hpp"

namespace randpolar
{

/*!
 * Radial step function x -> value_j for |x| in [break_{j-1}, break_j),
 * break_0 = 0, zero beyond the last break. Values are nonnegative.
 *
 * This is the canonical discretization for rearrangements: level sets are
 * unions of annuli, so level-set volumes and L_p norms are closed-form.
 */
class RadialStepFn
{
  public:
    RadialStepFn(std::size_t dim, std::vector<double> breaks, std::vector<double> values);

    std::size_t dim() const noexcept { return dim_; }
    const std::vector<double>& breaks() const noexcept { return breaks_; }
    const std::vector<double>& values() const noexcept { return values_; }

    double operator()(double radius) const;

    // |{f > alpha}|.
    double level_volume(double alpha) const;
    double integral() const;
    // L_p norm, p in [1, +inf].
    double lp_norm(double p) const;
    double sup() const;
    double support_radius() const;
    // Values nonincreasing in the radius (radial and decreasing).
    bool decreasing() const;

    // Volume of the j-th annulus.
    double piece_volume(std::size_t j) const;

    friend bool operator==(const RadialStepFn&, const RadialStepFn&) = default;

  private:
    std::size_t dim_;
    std::vector<double> breaks_;
    std::vector<double> values_;
};

/*!
 * Rotation-invariant measure d nu = rho(|x|) dx with rho decreasing.
 *
 * Kinds: Lebesgue restricted to R B_2^n (R may be +inf), the Gaussian-like
 * rho(t) = exp(-t^2 / 2 sigma^2), and rho = k^{-(n+1)} for a convex increasing
 * piecewise-linear k (linearly extended past its last knot).
 */
class RadialMeasure
{
  public:
    struct LebesgueBall
    {
        double radius;
    };
    struct Gaussian
    {
        double sigma;
    };
    struct PowerKernel
    {
        std::vector<double> t;
        std::vector<double> k;
    };
    using Kind = std::variant<LebesgueBall, Gaussian, PowerKernel>;

    static RadialMeasure lebesgue(std::size_t n,
                                  double radius = std::numeric_limits<double>::infinity());
    static RadialMeasure gaussian(std::size_t n, double sigma);
    static RadialMeasure power_kernel(std::size_t n, std::vector<double> t, std::vector<double> k);

    std::size_t dim() const noexcept { return dim_; }
    const Kind& kind() const noexcept { return kind_; }

    double rho(double t) const;
    bool finite_mass() const;
    // nu(R^n); +inf for infinite-mass measures.
    double total_mass() const;
    // nu(R B_2^n).
    double mass_within(double radius) const;
    // sup{s : rho(s) >= level}; 0 when the level exceeds rho(0), may be +inf.
    double level_radius(double level) const;
    // Radius outside which rho vanishes (+inf unless Lebesgue on a ball).
    double support_radius() const;
    std::string describe() const;

  private:
    RadialMeasure(std::size_t dim, Kind kind) : dim_(dim), kind_(std::move(kind)) {}

    double kernel(double t) const;  // k(t) for PowerKernel

    std::size_t dim_;
    Kind kind_;
};

double rho_eval(const RadialMeasure& m, double t);

struct Condnu2Check
{
    bool decreasing = true;
    bool condnu2 = true;
};

// Monotonicity of rho and convexity of rho^{-1/(n+1)} on an increasing grid
// (>= 3 points). Zeros of rho map to +inf, which is absorbing.
Condnu2Check check_condnu2(const RadialMeasure& m, const std::vector<double>& grid);
Condnu2Check check_condnu2(const std::function<double(double)>& rho, std::size_t n,
                           const std::vector<double>& grid);

/*!
 * Probability density bounded by one: uniform on a unit-volume body
 * (cube [-1/2, 1/2]^n, the ball D_n, or a centred simplex) or a radial step.
 */
class PnDensity
{
  public:
    enum class Shape
    {
        cube,
        ball,
        simplex
    };

    static PnDensity uniform_cube(std::size_t n);
    static PnDensity uniform_Dn(std::size_t n);
    static PnDensity uniform_simplex(std::size_t n);
    // Throws std::invalid_argument unless values lie in [0, 1] and integrate to 1.
    static PnDensity radial_step(RadialStepFn f);

    std::size_t dim() const noexcept { return dim_; }
    std::optional<Shape> shape() const noexcept { return shape_; }
    const RadialStepFn* radial() const noexcept { return radial_ ? &*radial_ : nullptr; }
    std::string kind_name() const;

    double eval(const Vector& x) const;
    double integral() const;
    double sup() const;
    double support_radius() const;

  private:
    PnDensity(std::size_t dim) : dim_(dim) {}

    std::size_t dim_;
    std::optional<Shape> shape_;
    std::optional<RadialStepFn> radial_;
};

// Symmetric decreasing rearrangement; exact for step inputs.
RadialStepFn rearrange_density(const RadialStepFn& f);
RadialStepFn rearrange_density(const PnDensity& f);

// Uniform point in R B_2^n.
Vector sample_uniform_ball(std::size_t n, double radius, RandomEngine& eng);
void sample_uniform_ball_into(double radius, RandomEngine& eng, Vector& out);
// Uniform direction on S^{n-1}.
void sample_direction_into(RandomEngine& eng, Vector& out);

// Exact sampler for the supported densities; radial steps use rejection
// from the bounding ball with envelope 1 (capped at 10^6 tries per point).
Vector sample_density(const PnDensity& f, RandomEngine& eng);
void sample_density_into(const PnDensity& f, RandomEngine& eng, Vector& out);

/*!
 * Draws points with law nu / nu(R^n) via inverse CDF of the radial law
 * proportional to rho(t) t^{n-1} (4096-point log-spaced table, linear
 * interpolation) times a uniform direction.
 */
class RadialMeasureSampler
{
  public:
    explicit RadialMeasureSampler(const RadialMeasure& m);

    double total_mass() const noexcept { return total_mass_; }
    double sample_radius(RandomEngine& eng) const;
    void sample_into(RandomEngine& eng, Vector& out) const;

  private:
    std::size_t dim_;
    double total_mass_;
    double lebesgue_radius_ = 0.0;  // > 0 selects the closed-form path
    std::vector<double> t_;
    std::vector<double> cdf_;
};

// Single draw plus total mass; builds a sampler on every call.
std::pair<Vector, double> sample_radial_measure(const RadialMeasure& m, RandomEngine& eng);

/*!
 * A density oracle on R^n for hyperplane and gauge integrals. When
 * support_radius is finite the density vanishes outside that ball.
 */
struct DensityOracle
{
    std::size_t dim = 0;
    std::function<double(const Vector&)> eval;
    double support_radius = std::numeric_limits<double>::infinity();
    std::string name;

    static DensityOracle gaussian_factor(std::size_t n, double sigma = 1.0);
    static DensityOracle cube_indicator(std::size_t n, double half_width = 1.0);
    static DensityOracle ball_indicator(std::size_t n, double radius = 1.0);
};

// nu^+(z^perp) = integral of psi over the hyperplane orthogonal to z.
// n in {2, 3}; relative tolerance 1e-7.
double nu_plus_hyperplane(const DensityOracle& psi, const Vector& z);

}  // namespace randpolar
