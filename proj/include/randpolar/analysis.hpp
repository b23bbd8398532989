#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "randpolar/geom.hpp"
#include "randpolar/measure.hpp"
#include "randpolar/rng.hpp"

namespace randpolar
{

struct ProfileVerdict
{
    bool even = true;
    bool midpoint_convex = true;
    // Quasi-concavity of 1/g on the grid, checked directly.
    bool reciprocal_quasi_concave = true;
    double worst_violation = 0.0;
    // Worst excess over the allowed tolerance (<= 0 means every check passed).
    double worst_excess = -std::numeric_limits<double>::infinity();
    std::size_t triples_checked = 0;
    std::size_t pairs_checked = 0;
};

// Values g(t) on a sorted scalar grid; t parametrizes a line t * direction.
struct ProfileReport
{
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> std_error;
    std::vector<double> direction;
    std::string method;  // "exact", "monte_carlo" or "quadrature"
    double tolerance = 0.0;
    double sigma_multiplier = 0.0;
    ProfileVerdict verdict;
};

// "t,value,stderr" rows with a header line.
std::string profile_csv(const ProfileReport& p);
nlohmann::json profile_json(const ProfileReport& p);

/*!
 * Midpoint convexity over every triple t_i < t_j < t_k of grid points with
 * t_j = (t_i + t_k)/2, and evenness over every mirrored pair. A check passes
 * when the violation is at most tol + sigma_mult * (propagated stderr).
 */
ProfileVerdict convexity_even_check(const ProfileReport& p, double tol, double sigma_mult = 0.0);

/*!
 * Parallel chord movement of the columns: column i is y_i + t d_i theta with
 * y_i in theta^perp. The gauge must be origin-symmetric.
 */
struct ShadowConfig
{
    Vector theta;
    std::vector<Vector> base;
    CoefficientGauge gauge;
    double r = 0.0;
    RadialMeasure measure;
};

void validate_shadow_config(const ShadowConfig& cfg);

// The body [y_1 + t d_1 theta ... y_N + t d_N theta] C + r B.
Body shadow_body(const ShadowConfig& cfg, const std::vector<double>& direction, double t);

enum class ProfileEstimator
{
    automatic,  // exact when available, else Monte Carlo
    exact,
    monte_carlo
};

// True when shadow bodies admit the exact polar measure oracle.
bool shadow_exact_available(const ShadowConfig& cfg);

/*!
 * g(t) = 1 / nu(K_t°) over a grid symmetric about 0 (at least 3 points).
 * Exact values get tolerance 1e-9; Monte Carlo values are judged with
 * 3 propagated standard errors. Grid point i uses rng.substream(i).
 */
ProfileReport shadow_profile(const ShadowConfig& cfg, const std::vector<double>& direction,
                             const std::vector<double>& t_grid, std::uint64_t budget,
                             RngStream rng, ProfileEstimator estimator = ProfileEstimator::automatic,
                             unsigned threads = 1);

// Phi(z) = |z| / nu^+(z^perp); Phi(0) = 0.
double busemann_gauge(const DensityOracle& psi, const Vector& z);

struct ConcavityCheck
{
    bool verified = true;
    std::size_t segments = 0;
    double worst_violation = 0.0;
};

// Midpoint convexity of psi^{-1/n} (zeros map to +inf) on random segments
// inside the support ball (radius 3 for unbounded support).
ConcavityCheck concavity_spot_check(const DensityOracle& psi, RngStream rng,
                                    std::size_t segments = 50);

/*!
 * Phi(v) = |v|^{(2p-1)/p} (integral over E + R_+ v of <x, v>^{p-1} phi)^{-1/p}
 * for v orthogonal to the subspace E (given by a basis, possibly empty).
 * Ambient dimension at most 3. Evaluated on the unit direction and scaled,
 * so homogeneity is exact up to rounding.
 */
double milman_pajor_gauge(const DensityOracle& phi, const std::vector<Vector>& subspace,
                          double p, const Vector& v);

// F(x) = (integral_0^inf f(r x) r^{p-1} dr)^{-1/p}, via u = r^p.
double ball_bobkov_gauge(const DensityOracle& f, double p, const Vector& x);

// Positive convex function phi(t, x) on R x R^n; +inf marks points outside
// its domain. Zero outside `x_radius` when that is finite.
struct BrunnOracle
{
    std::size_t dim = 1;
    std::function<double(double, const Vector&)> phi;
    double x_radius = std::numeric_limits<double>::infinity();
    std::string name;

    static BrunnOracle hyperbolic(std::size_t n);
    static BrunnOracle exp_abs(std::size_t n);
    static BrunnOracle constant(std::size_t n, double c = 2.0, double half_width = 1.0);
};

// Phi(t) = (integral phi(t, x)^{-n-alpha} dx)^{-1/alpha} on the grid, n in
// {1, 2}, judged for midpoint convexity with tolerance 1e-6 relative.
ProfileReport brunn_profile(const BrunnOracle& varphi, double alpha,
                            const std::vector<double>& t_grid);

// Nonnegative step function on the real line: value on [lo, hi).
class StepFn1d
{
  public:
    struct Piece
    {
        double lo, hi, value;
        friend bool operator==(const Piece&, const Piece&) = default;
    };

    explicit StepFn1d(std::vector<Piece> pieces);
    static StepFn1d indicator(double lo, double hi);

    const std::vector<Piece>& pieces() const noexcept { return pieces_; }
    double operator()(double s) const;
    double integral() const;
    // Symmetric about 0 and nonincreasing in |s|.
    bool symmetric_decreasing() const;

    friend bool operator==(const StepFn1d&, const StepFn1d&) = default;

  private:
    std::vector<Piece> pieces_;
};

// Symmetric decreasing rearrangement; returns the input unchanged when it is
// already symmetric decreasing.
StepFn1d rearrange_1d(const StepFn1d& g);

struct RbllResult
{
    double lhs = 0.0;
    double rhs = 0.0;
};

/*!
 * lhs = integral over s in [-L, L]^N of prod_i g_i(sum_j c_ij s_j), and rhs
 * the same with every g_i replaced by g_i*. The box is itself a product of
 * symmetric decreasing factors, so lhs <= rhs. Integrated exactly by
 * expanding the product into polytope volumes. k, N <= 3.
 */
RbllResult rbll_check_1d(const std::vector<StepFn1d>& g, const Matrix& coeffs, double half_width);

struct RbllCase
{
    std::vector<StepFn1d> g;
    Matrix coeffs;
    double half_width = 3.0;
};

// Every k, N in {1, 2, 3}, every coefficient matrix in {-1, 0, 1}^{k x N},
// and every placement of unit intervals [o, o+1) with o in {-1/2, 0, 1}.
std::vector<RbllCase> rbll_exhaustive_family();

struct RbllSummary
{
    std::size_t cases = 0;
    std::size_t violations = 0;
    std::size_t symmetric_cases = 0;
    std::size_t symmetric_inequalities = 0;  // symmetric inputs with lhs != rhs
    double worst_gap = -std::numeric_limits<double>::infinity();  // max lhs - rhs
    std::vector<RbllResult> results;                                 // per case, in order
};

RbllSummary rbll_check_family(const std::vector<RbllCase>& cases, double tol = 1e-9,
                              unsigned threads = 1);

}  // namespace randpolar
