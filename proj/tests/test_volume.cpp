#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"

#include "randpolar/error.hpp"
#include "randpolar/volume.hpp"
#include "support.hpp"

using namespace randpolar;
using doctest::Approx;

namespace
{
const double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

Vector v2(double a, double b)
{
    Vector v(2);
    v << a, b;
    return v;
}

Matrix columns(const std::vector<Vector>& pts)
{
    Matrix m(pts.front().size(), static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i)
        m.col(static_cast<Eigen::Index>(i)) = pts[i];
    return m;
}

Body crosspoly(const std::vector<Vector>& pts)
{
    return Body::matrix_image(columns(pts), CoefficientGauge::lq(pts.size(), 1.0));
}

std::vector<Vector> standard_basis(std::size_t n)
{
    std::vector<Vector> e;
    for (std::size_t i = 0; i < n; ++i)
        e.push_back(Vector::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)));
    return e;
}

bool within(const Estimate& e, double truth, double k = 3.0)
{
    return std::abs(e.value - truth) <= k * e.std_error;
}
}  // namespace

TEST_CASE("running statistics merge like a single pass")
{
    testing::Gen g(1);
    RunningStats all, a, b;
    for (int i = 0; i < 1000; ++i)
    {
        const double x = testing::uniform(g, -3.0, 5.0);
        all.add(x);
        (i < 370 ? a : b).add(x);
    }
    a.merge(b);
    CHECK(a.count() == all.count());
    CHECK(a.mean() == Approx(all.mean()).epsilon(1e-13));
    CHECK(a.variance() == Approx(all.variance()).epsilon(1e-12));
    RunningStats empty;
    empty.merge(all);
    CHECK(empty.mean() == all.mean());
    CHECK(RunningStats{}.variance() == 0.0);
}

TEST_CASE("Monte Carlo polar volume of D_2 is pi squared")
{
    const Body d2 = Body::ball(2, unit_volume_ball_radius(2));
    const Estimate e = mc_polar_measure(d2, RadialMeasure::lebesgue(2), 200000, RngStream{1, 0});
    CHECK(e.samples == 200000);
    // The sampling ball is D_2° itself, so every point hits and the
    // estimator has zero variance.
    CHECK(e.std_error == 0.0);
    CHECK(e.value == Approx(kPi * kPi).epsilon(1e-14));

    // A body with a looser sampling bound: the square of half-width 1/2.
    const Body sq = Body::hpolytope({v2(1, 0), v2(-1, 0), v2(0, 1), v2(0, -1)}, {0.5, 0.5, 0.5, 0.5});
    const Estimate s = mc_polar_measure(sq, RadialMeasure::lebesgue(2), 200000, RngStream{1, 1});
    CHECK(s.std_error > 0.0);
    CHECK(within(s, 8.0));
}

TEST_CASE("Monte Carlo polar volumes of cross-polytopes")
{
    const Estimate sq = mc_polar_measure(crosspoly(standard_basis(2)), RadialMeasure::lebesgue(2), 200000,
                                         RngStream{2, 0});
    CHECK(within(sq, 4.0));
    const std::vector<Vector> pts{v2(1, 0), v2(0, 1), v2(1, 1)};
    const Estimate hex = mc_polar_measure(crosspoly(pts), RadialMeasure::lebesgue(2), 200000, RngStream{3, 0});
    CHECK(within(hex, 3.0));

    // Grid-count oracle for the same hexagon.
    auto inside = [](double x, double y) {
        return std::abs(x) <= 1.0 && std::abs(y) <= 1.0 && std::abs(x + y) <= 1.0;
    };
    CHECK(testing::grid_area_2d(inside, 1.0, 2000) == Approx(3.0).epsilon(2e-3));
    CHECK(exact_polar_volume_crosspoly(pts, 2) == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("Monte Carlo uses the finite-mass sampler when the polar is unbounded")
{
    Matrix e1(2, 1);
    e1 << 1, 0;
    const Body strip_polar = Body::matrix_image(e1, CoefficientGauge::lq(1, 1.0));
    // Gaussian mass of the strip |y_1| <= 1 is 2 pi (2 Phi(1) - 1).
    const double truth = 2.0 * kPi * std::erf(1.0 / std::sqrt(2.0));
    const Estimate e = mc_polar_measure(strip_polar, RadialMeasure::gaussian(2, 1.0), 200000, RngStream{4, 0});
    CHECK(within(e, truth));
    CHECK_THROWS_AS(mc_polar_measure(strip_polar, RadialMeasure::lebesgue(2), 1000, RngStream{4, 0}),
                    InfeasibleError);
    // With a finite Lebesgue support the strip is cut to a 2 x 2 rectangle minus caps.
    const Estimate capped = mc_polar_measure(strip_polar, RadialMeasure::lebesgue(2, 2.0), 200000, RngStream{4, 1});
    CHECK(within(capped, *exact_polar_measure(strip_polar, RadialMeasure::lebesgue(2, 2.0))));
}

TEST_CASE("layer-cake estimates")
{
    const Body ball = Body::ball(2, 1.0);
    const RadialMeasure gauss = RadialMeasure::gaussian(2, 1.0);
    const LayerCakeResult lc = layer_cake_measure(ball, gauss, default_level_grid(gauss, 256), 200000, RngStream{5, 0});
    CHECK_FALSE(lc.low_accuracy);
    const double truth = 2.0 * kPi * (1.0 - std::exp(-0.5));
    CHECK(lc.estimate.value == Approx(truth).epsilon(1e-2));

    const RadialMeasure leb = RadialMeasure::lebesgue(2, 0.5);
    const LayerCakeResult single = layer_cake_measure(ball, leb, {1.0}, 200000, RngStream{5, 1});
    CHECK(single.low_accuracy);
    CHECK(within(single.estimate, kPi * 0.25));

    const auto levels = default_level_grid(gauss, 10);
    REQUIRE(levels.size() == 10);
    CHECK(levels.front() == Approx(1e-6));
    CHECK(levels.back() == 1.0);
    CHECK(std::is_sorted(levels.begin(), levels.end()));
}

TEST_CASE("exact polar volumes of cross-polytopes")
{
    CHECK(exact_polar_volume_crosspoly(standard_basis(2), 2) == Approx(4.0).epsilon(1e-12));
    CHECK(exact_polar_volume_crosspoly(standard_basis(3), 3) == Approx(8.0).epsilon(1e-12));
    CHECK(exact_polar_volume_crosspoly_enum(standard_basis(3), 3) == Approx(8.0).epsilon(1e-12));
    const std::vector<Vector> one{Vector::Constant(1, 0.25)};
    CHECK(exact_polar_volume_crosspoly(one, 1) == Approx(8.0));
    CHECK_THROWS_AS(exact_polar_volume_crosspoly(std::vector<Vector>{v2(1, 0), v2(2, 0)}, 2), InfeasibleError);

    // Finite R: square polar cut by a disk.
    CHECK(exact_polar_measure_crosspoly(standard_basis(2), 2, 0.5) == Approx(kPi / 4.0).epsilon(1e-12));
    CHECK(exact_polar_measure_crosspoly(standard_basis(2), 2, 10.0) == Approx(4.0).epsilon(1e-12));
    // Degenerate points with finite R: a slab in the disk.
    CHECK(exact_polar_measure_crosspoly(std::vector<Vector>{v2(1, 0)}, 2, 2.0)
          == Approx(4.0 * kPi - 2.0 * (4.0 * std::acos(0.5) - std::sqrt(3.0))).epsilon(1e-12));
}

TEST_CASE("exact measure dispatch")
{
    CHECK(*exact_polar_measure(Body::ball(3, 2.0), RadialMeasure::lebesgue(3))
          == Approx(4.0 * kPi / 3.0 / 8.0));
    CHECK(*exact_polar_measure(Body::ball(2, 1.0), RadialMeasure::gaussian(2, 1.0))
          == Approx(2.0 * kPi * (1.0 - std::exp(-0.5))));
    const Body square = Body::hpolytope({v2(1, 0), v2(-1, 0), v2(0, 1), v2(0, -1)}, {1, 1, 1, 1});
    // The polar of [-1,1]^2 is the cross-polytope of area 2.
    CHECK(*exact_polar_measure(square, RadialMeasure::lebesgue(2)) == Approx(2.0).epsilon(1e-12));
    const Body l2 = Body::matrix_image(Matrix::Identity(2, 2), CoefficientGauge::lq(2, 2.0));
    CHECK_FALSE(exact_polar_measure(l2, RadialMeasure::lebesgue(2)));
}

TEST_CASE("property: the polar volume shrinks when points are added")
{
    testing::Gen g(31);
    for (int trial = 0; trial < 100; ++trial)
    {
        const std::size_t n = 2 + trial % 2;
        std::vector<Vector> pts;
        for (std::size_t i = 0; i < n + 1; ++i)
            pts.push_back(testing::gaussian_vector(g, n));
        const double before = exact_polar_volume_crosspoly(pts, n);
        pts.push_back(testing::gaussian_vector(g, n));
        const double after = exact_polar_volume_crosspoly(pts, n);
        CHECK(after <= before * (1.0 + 1e-12));
    }
}

TEST_CASE("property: scaling the points by lambda scales the polar volume by lambda^-n")
{
    testing::Gen g(32);
    for (int trial = 0; trial < 100; ++trial)
    {
        const std::size_t n = 1 + trial % 3;
        const double lambda = testing::uniform(g, 0.2, 5.0);
        std::vector<Vector> pts, scaled;
        for (std::size_t i = 0; i < n + 2; ++i)
        {
            pts.push_back(testing::gaussian_vector(g, n));
            scaled.push_back(lambda * pts.back());
        }
        CHECK(exact_polar_volume_crosspoly(scaled, n)
              == Approx(exact_polar_volume_crosspoly(pts, n) * std::pow(lambda, -static_cast<double>(n)))
                     .epsilon(1e-10));
    }
}

TEST_CASE("property: clipping and enumeration agree on random point sets")
{
    testing::Gen g(33);
    for (int trial = 0; trial < 60; ++trial)
    {
        const std::size_t n = 2 + trial % 2;
        std::vector<Vector> pts;
        for (std::size_t i = 0; i < n + trial % 5; ++i)
            pts.push_back(testing::gaussian_vector(g, n));
        CHECK(exact_polar_volume_crosspoly(pts, n)
              == Approx(exact_polar_volume_crosspoly_enum(pts, n)).epsilon(1e-9));
    }
}

TEST_CASE("property: finite-radius exact measure is monotone in the radius")
{
    testing::Gen g(34);
    for (int trial = 0; trial < 60; ++trial)
    {
        std::vector<Vector> pts;
        for (int i = 0; i < 3; ++i)
            pts.push_back(testing::gaussian_vector(g, 2));
        double prev = 0.0;
        for (double R : {0.1, 0.5, 1.0, 2.0, 8.0, kInf})
        {
            const double v = exact_polar_measure_crosspoly(pts, 2, R);
            CHECK(v >= prev * (1.0 - 1e-12));
            CHECK(v <= kPi * R * R * (1.0 + 1e-12));
            prev = v;
        }
        CHECK(prev == Approx(exact_polar_volume_crosspoly(pts, 2)).epsilon(1e-12));
    }
}

TEST_CASE("Monte Carlo output does not depend on the thread count")
{
    const Body k = crosspoly({v2(1, 0.2), v2(-0.3, 1), v2(0.5, 0.5)});
    const RadialMeasure m = RadialMeasure::lebesgue(2, 3.0);
    const Estimate a = mc_polar_measure(k, m, 300001, RngStream{9, 0}, 1);
    const Estimate b = mc_polar_measure(k, m, 300001, RngStream{9, 0}, 4);
    CHECK(a == b);
    CHECK(a.streams == (300001 + kChunkSize - 1) / kChunkSize);
    const LayerCakeResult la = layer_cake_measure(k, RadialMeasure::gaussian(2, 1.0),
                                                  default_level_grid(RadialMeasure::gaussian(2, 1.0), 16),
                                                  150000, RngStream{9, 1}, 1);
    const LayerCakeResult lb = layer_cake_measure(k, RadialMeasure::gaussian(2, 1.0),
                                                  default_level_grid(RadialMeasure::gaussian(2, 1.0), 16),
                                                  150000, RngStream{9, 1}, 3);
    CHECK(la.estimate == lb.estimate);
}

TEST_CASE("estimate JSON carries value, stderr, samples, seed and streams")
{
    const Estimate e{1.5, 0.25, 100, 7, 1};
    const nlohmann::json j = e;
    CHECK(j.at("value") == 1.5);
    CHECK(j.at("stderr") == 0.25);
    CHECK(j.at("samples") == 100);
    CHECK(j.at("seed") == 7);
    CHECK(j.at("streams") == 1);
}
