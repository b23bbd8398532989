#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "randpolar/rng.hpp"

namespace randpolar
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Conjugate exponent q' with 1/q + 1/q' = 1; q = 1 maps to +inf and back.
double dual_exponent(double q);

// l_q norm, q in [1, +inf].
double lq_norm(const Vector& u, double q);

/*!
 * The convex set C in R^N that the columns of a body's matrix act on.
 *
 * Either the l_q unit ball B_q^N or a user oracle. An oracle supplies both the
 * gauge ||.||_C and the support function h_C (the dual norm); only the
 * support function enters polar computations.
 */
class CoefficientGauge
{
  public:
    using Evaluator = std::function<double(const Vector&)>;

    static CoefficientGauge lq(std::size_t dim, double q);
    static CoefficientGauge oracle(std::size_t dim, Evaluator gauge, Evaluator support,
                                   bool unconditional, bool symmetric,
                                   std::string name = "oracle");

    std::size_t dim() const noexcept { return dim_; }
    bool is_lq() const noexcept { return !gauge_; }
    // Exponent of the l_q ball; NaN for oracles.
    double q() const noexcept { return q_; }
    bool unconditional() const noexcept { return unconditional_; }
    bool symmetric() const noexcept { return symmetric_; }
    const std::string& name() const noexcept { return name_; }

    double norm(const Vector& c) const;
    double support(const Vector& u) const;

    // Smallest c with h_C(u) >= c |u| for every u, when known in closed form.
    std::optional<double> support_lower_constant() const;

  private:
    CoefficientGauge() = default;

    std::size_t dim_ = 0;
    double q_ = 1.0;
    double dual_q_ = 0.0;
    Evaluator gauge_;
    Evaluator support_;
    bool unconditional_ = true;
    bool symmetric_ = true;
    std::string name_;
};

struct GaugeCheck
{
    bool homogeneous = true;
    bool unconditional = true;
    double worst_violation = 0.0;
};

// Spot-checks positive homogeneity and, when declared, coordinate-sign
// invariance of ||.||_C on seeded random samples.
GaugeCheck check_gauge(const CoefficientGauge& gauge, RngStream rng, int samples = 200);

/*!
 * A convex body containing the origin.
 *
 * Three representations: the matrix image [x_1 ... x_N] C + r B_2^n, a
 * Euclidean ball, and an H-polytope {x : <a_i, x> <= b_i}. H-polytope support
 * values need its vertex set, which is enumerated at construction for n <= 3.
 */
class Body
{
  public:
    struct MatrixImage
    {
        Matrix columns;  // n x N
        CoefficientGauge gauge;
        double r = 0.0;
    };
    struct Ball
    {
        double radius = 1.0;
    };
    struct HPolytope
    {
        std::vector<Vector> normals;
        std::vector<double> offsets;
        std::vector<Vector> vertices;  // empty when n > 3
    };
    using Kind = std::variant<MatrixImage, Ball, HPolytope>;

    static Body matrix_image(Matrix columns, CoefficientGauge gauge, double r = 0.0);
    static Body ball(std::size_t n, double radius);
    static Body hpolytope(std::vector<Vector> normals, std::vector<double> offsets);

    std::size_t dim() const noexcept { return dim_; }
    const Kind& kind() const noexcept { return kind_; }

    const MatrixImage* as_matrix_image() const { return std::get_if<MatrixImage>(&kind_); }
    const Ball* as_ball() const { return std::get_if<Ball>(&kind_); }
    const HPolytope* as_hpolytope() const { return std::get_if<HPolytope>(&kind_); }

    // Origin symmetry known from the representation.
    bool symmetric() const;

  private:
    Body(std::size_t dim, Kind kind) : dim_(dim), kind_(std::move(kind)) {}

    std::size_t dim_;
    Kind kind_;
};

/*!
 * Unit directions discretizing S^{n-1}.
 *
 * Lattices (n <= 3) come with a rigorous covering radius: every unit vector is
 * within covering_radius() of some grid point. Random grids report NaN.
 */
class DirectionGrid
{
  public:
    // n = 1: {+1, -1}. n = 2: `resolution` equally spaced angles.
    // n = 3: radial projection of a (resolution+1)^2 node grid on each cube face.
    static DirectionGrid lattice(std::size_t n, std::size_t resolution);
    static DirectionGrid random(std::size_t n, std::size_t count, RngStream rng);

    std::size_t dim() const noexcept { return dim_; }
    const std::vector<Vector>& directions() const noexcept { return directions_; }
    double covering_radius() const noexcept { return covering_radius_; }

  private:
    DirectionGrid(std::size_t dim, std::vector<Vector> dirs, double covering);

    std::size_t dim_;
    std::vector<Vector> directions_;
    double covering_radius_;
};

// h_K(y). Returns +inf when the gauge support is unbounded in direction A^T y.
double support_value(const Body& body, const Vector& y);

// y in K°, i.e. h_K(y) <= 1 (boundary included).
bool polar_membership(const Body& body, const Vector& y);

// Radius of a ball containing K°, from the grid; nullopt when K° is unbounded.
std::optional<double> polar_bounding_radius(const Body& body, const DirectionGrid& grid);

// Rigorous radius R with K° inside R B_2^n, used to bound Monte Carlo
// sampling domains. Combines 1/r, the exact facet distance for H-polytopes,
// a Lipschitz-corrected lattice bound (n <= 3) and a singular-value bound
// for l_q gauges. nullopt when K° is unbounded or no bound is available.
std::optional<double> polar_sampling_radius(const Body& body);

// max over the grid of |h_a - h_b|; a lower bound on the Hausdorff distance.
double hausdorff_estimate(const Body& a, const Body& b, const DirectionGrid& grid);

// Lebesgue volume of the body when available in closed form or exactly:
// balls, H-polytopes with n <= 3, and matrix images with square invertible
// matrix, r = 0 and an l_q gauge.
std::optional<double> body_volume(const Body& body);

// Volume of the Euclidean unit ball in R^n.
double unit_ball_volume(std::size_t n);

// Radius of D_n, the centred Euclidean ball of volume one.
double unit_volume_ball_radius(std::size_t n);

}  // namespace randpolar
