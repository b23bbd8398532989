#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"

#include "randpolar/error.hpp"
#include "randpolar/measure.hpp"
#include "support.hpp"

using namespace randpolar;
using doctest::Approx;

namespace
{
const double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

std::vector<double> linear_grid(double lo, double hi, int count)
{
    std::vector<double> g;
    for (int i = 0; i < count; ++i)
        g.push_back(lo + (hi - lo) * i / (count - 1));
    return g;
}

// Random step function with nonnegative values, not necessarily monotone.
RadialStepFn random_step(testing::Gen& g, std::size_t n)
{
    const int pieces = 1 + static_cast<int>(g() % 6);
    std::vector<double> breaks, values;
    double r = 0.0;
    for (int i = 0; i < pieces; ++i)
    {
        r += testing::uniform(g, 0.05, 1.0);
        breaks.push_back(r);
        // Repeated and zero values exercise level merging.
        const int pick = static_cast<int>(g() % 5);
        values.push_back(pick == 0 ? 0.0 : (pick == 1 ? 0.5 : testing::uniform(g, 0.0, 1.0)));
    }
    return RadialStepFn(n, breaks, values);
}
}  // namespace

TEST_CASE("rho values")
{
    CHECK(rho_eval(RadialMeasure::lebesgue(2, 2.0), 1.0) == 1.0);
    CHECK(rho_eval(RadialMeasure::lebesgue(2, 2.0), 3.0) == 0.0);
    CHECK(rho_eval(RadialMeasure::gaussian(2, 1.0), 0.0) == 1.0);
    CHECK(rho_eval(RadialMeasure::gaussian(3, 2.0), 2.0) == Approx(std::exp(-0.5)));
    const RadialMeasure pk = RadialMeasure::power_kernel(2, {0.0, 1.0, 2.0}, {1.0, 1.5, 3.0});
    CHECK(pk.rho(0.5) == Approx(std::pow(1.25, -3.0)));
    CHECK(pk.rho(4.0) == Approx(std::pow(6.0, -3.0)));  // extended with the last slope
}

TEST_CASE("condnu2 checks")
{
    const auto grid = linear_grid(0.0, 10.0, 401);
    for (std::size_t n = 1; n <= 10; ++n)
    {
        for (double R : {0.5, 2.0, 5.0, kInf})
        {
            const Condnu2Check c = check_condnu2(RadialMeasure::lebesgue(n, R), grid);
            CHECK(c.decreasing);
            CHECK(c.condnu2);
        }
        for (double sigma : {0.3, 1.0, 4.0})
        {
            const Condnu2Check c = check_condnu2(RadialMeasure::gaussian(n, sigma), grid);
            CHECK(c.decreasing);
            CHECK(c.condnu2);
        }
    }
    // Step rho with values (1, 0.5, 0.9) on unit pieces.
    auto step = [](double t) { return t < 1.0 ? 1.0 : (t < 2.0 ? 0.5 : (t < 3.0 ? 0.9 : 0.0)); };
    const Condnu2Check bad = check_condnu2(step, 2, linear_grid(0.0, 4.0, 81));
    CHECK_FALSE(bad.decreasing);
    CHECK_FALSE(bad.condnu2);

    // rho = (1 + t)^{-1/2} decreases, but rho^{-1/3} = (1 + t)^{1/6} is concave.
    auto slow = [](double t) { return 1.0 / std::sqrt(1.0 + t); };
    const Condnu2Check concave = check_condnu2(slow, 2, linear_grid(0.0, 4.0, 81));
    CHECK(concave.decreasing);
    CHECK_FALSE(concave.condnu2);
}

TEST_CASE("rearrangement examples")
{
    for (std::size_t n = 1; n <= 4; ++n)
    {
        const RadialStepFn d = rearrange_density(PnDensity::uniform_Dn(n));
        REQUIRE(d.values().size() == 1);
        CHECK(d.values()[0] == 1.0);
        CHECK(d.breaks()[0] == Approx(unit_volume_ball_radius(n)).epsilon(1e-14));
    }

    // Annulus of area pi -> unit disk.
    const RadialStepFn annulus(2, {1.0, std::sqrt(2.0)}, {0.0, 1.0});
    const RadialStepFn disk = rearrange_density(annulus);
    REQUIRE(disk.values().size() == 1);
    CHECK(disk.values()[0] == 1.0);
    CHECK(disk.breaks()[0] == Approx(1.0).epsilon(1e-14));

    // 0.2 on [0,1], 0.8 on [1,2] in R -> 0.8 on [0,1], 0.2 on [1,2].
    const RadialStepFn swapped = rearrange_density(RadialStepFn(1, {1.0, 2.0}, {0.2, 0.8}));
    REQUIRE(swapped.values().size() == 2);
    CHECK(swapped.values()[0] == 0.8);
    CHECK(swapped.values()[1] == 0.2);
    CHECK(swapped.breaks()[0] == Approx(1.0));
    CHECK(swapped.breaks()[1] == Approx(2.0));
    // Direct level-set check: |{f > a}| for a between the two values.
    CHECK(swapped.level_volume(0.5) == Approx(2.0));
    CHECK(swapped.level_volume(0.1) == Approx(4.0));
}

TEST_CASE("property: rearrangement is equimeasurable, norm-preserving and idempotent")
{
    testing::Gen g(2024);
    for (int trial = 0; trial < 300; ++trial)
    {
        const std::size_t n = 1 + trial % 4;
        const RadialStepFn f = random_step(g, n);
        const RadialStepFn s = rearrange_density(f);
        CHECK(s.decreasing());
        // Level volumes at every value, between values, and beyond the sup.
        std::vector<double> alphas{0.0, f.sup(), f.sup() + 0.1};
        for (double v : f.values())
        {
            alphas.push_back(v);
            alphas.push_back(0.999 * v);
        }
        for (double a : alphas)
            CHECK(s.level_volume(a) == Approx(f.level_volume(a)).epsilon(1e-12));
        for (double p : {1.0, 2.0, kInf})
            CHECK(s.lp_norm(p) == Approx(f.lp_norm(p)).epsilon(1e-9));
        CHECK(rearrange_density(s) == s);
    }
}

TEST_CASE("densities integrate to one and are bounded by one")
{
    for (std::size_t n = 1; n <= 4; ++n)
    {
        CHECK(PnDensity::uniform_cube(n).integral() == Approx(1.0).epsilon(1e-12));
        CHECK(PnDensity::uniform_Dn(n).integral() == Approx(1.0).epsilon(1e-12));
        CHECK(PnDensity::uniform_simplex(n).integral() == Approx(1.0).epsilon(1e-12));
        CHECK(PnDensity::uniform_cube(n).sup() <= 1.0);
    }
    CHECK_THROWS_AS(PnDensity::radial_step(RadialStepFn(2, {0.5}, {1.5})), std::invalid_argument);
    CHECK_THROWS_AS(PnDensity::radial_step(RadialStepFn(2, {0.5}, {1.0})), std::invalid_argument);
}

TEST_CASE("uniform ball sampler")
{
    RandomEngine eng(RngStream{3, 0});
    for (int i = 0; i < 10000; ++i)
    {
        const Vector x = sample_uniform_ball(1, 0.5, eng);
        REQUIRE(std::abs(x(0)) <= 0.5);
    }
    const int m = 100000;
    Vector mean = Vector::Zero(2);
    int inner = 0;
    for (int i = 0; i < m; ++i)
    {
        const Vector x = sample_uniform_ball(2, 1.0, eng);
        REQUIRE(x.norm() <= 1.0);
        mean += x;
        inner += x.norm() <= 0.5;
    }
    mean /= m;
    CHECK(std::abs(mean(0)) <= 3.0 / std::sqrt(2.0 * m) + 1e-3);
    CHECK(std::abs(mean(1)) <= 3.0 / std::sqrt(2.0 * m) + 1e-3);
    const double frac = static_cast<double>(inner) / m;
    CHECK(std::abs(frac - 0.25) <= 3.0 * std::sqrt(0.25 * 0.75 / m));
}

TEST_CASE("density samplers")
{
    RandomEngine eng(RngStream{4, 0});
    const PnDensity cube = PnDensity::uniform_cube(2);
    for (int i = 0; i < 10000; ++i)
    {
        const Vector x = sample_density(cube, eng);
        REQUIRE(x.cwiseAbs().maxCoeff() <= 0.5);
    }

    // E|X|^2 on D_2 is r^2 / 2 = 1 / (2 pi).
    const int m = 100000;
    const PnDensity d2 = PnDensity::uniform_Dn(2);
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < m; ++i)
    {
        const double r2 = sample_density(d2, eng).squaredNorm();
        s1 += r2;
        s2 += r2 * r2;
    }
    const double mean = s1 / m, var = s2 / m - mean * mean;
    CHECK(std::abs(mean - 1.0 / (2.0 * kPi)) <= 3.0 * std::sqrt(var / m));

    // Radial step: annulus masses.
    const double a2 = (1.0 - kPi * 0.09) / (kPi * 0.55);
    const PnDensity step = PnDensity::radial_step(RadialStepFn(2, {0.3, 0.8}, {1.0, a2}));
    const double p_inner = kPi * 0.09;
    int inner = 0;
    for (int i = 0; i < m; ++i)
    {
        const double r = sample_density(step, eng).norm();
        REQUIRE(r <= 0.8);
        inner += r < 0.3;
    }
    CHECK(std::abs(static_cast<double>(inner) / m - p_inner) <= 3.0 * std::sqrt(p_inner * (1 - p_inner) / m));

    // The simplex sampler stays in its (centred, scaled) support.
    const PnDensity simplex = PnDensity::uniform_simplex(2);
    for (int i = 0; i < 5000; ++i)
        REQUIRE(simplex.eval(sample_density(simplex, eng)) > 0.0);
}

TEST_CASE("samplers are reproducible")
{
    RandomEngine a(RngStream{8, 8}), b(RngStream{8, 8});
    const PnDensity law = PnDensity::uniform_simplex(3);
    for (int i = 0; i < 100; ++i)
        CHECK(sample_density(law, a) == sample_density(law, b));
}

TEST_CASE("radial measure sampler")
{
    RandomEngine eng(RngStream{5, 0});
    const auto [p, mass] = sample_radial_measure(RadialMeasure::lebesgue(2, 3.0), eng);
    CHECK(mass == Approx(9.0 * kPi));
    CHECK(p.norm() <= 3.0);

    const RadialMeasureSampler gauss(RadialMeasure::gaussian(2, 1.0));
    CHECK(gauss.total_mass() == Approx(2.0 * kPi));
    // Rayleigh radius: mean sqrt(pi/2), variance (4 - pi)/2.
    const int m = 100000;
    double s = 0.0;
    for (int i = 0; i < m; ++i)
        s += gauss.sample_radius(eng);
    CHECK(std::abs(s / m - std::sqrt(kPi / 2.0)) <= 3.0 * std::sqrt((4.0 - kPi) / 2.0 / m));

    CHECK_THROWS_AS(sample_radial_measure(RadialMeasure::lebesgue(2), eng), InfeasibleError);
}

TEST_CASE("masses of balls")
{
    const RadialMeasure g2 = RadialMeasure::gaussian(2, 1.0);
    for (double R : {0.1, 1.0, 2.5, 10.0})
        CHECK(g2.mass_within(R) == Approx(2.0 * kPi * (1.0 - std::exp(-R * R / 2.0))).epsilon(1e-10));
    CHECK(g2.mass_within(kInf) == Approx(2.0 * kPi));

    const RadialMeasure g3 = RadialMeasure::gaussian(3, 1.5);
    for (double R : {0.5, 2.0, 6.0})
    {
        const double oracle = testing::simpson(
            [](double t) { return 4.0 * kPi * t * t * std::exp(-t * t / (2.0 * 2.25)); }, 0.0, R, 20000);
        CHECK(g3.mass_within(R) == Approx(oracle).epsilon(1e-9));
    }
    CHECK(g3.total_mass() == Approx(std::pow(2.0 * kPi * 2.25, 1.5)));

    const RadialMeasure pk = RadialMeasure::power_kernel(2, {0.0, 1.0, 2.0}, {1.0, 1.5, 3.0});
    auto k = [](double t) { return t < 1.0 ? 1.0 + 0.5 * t : 1.5 + 1.5 * (t - 1.0); };
    for (double R : {0.5, 1.7, 50.0})
    {
        double oracle = 0.0;
        const double knots[] = {0.0, 1.0, R};
        for (int i = 0; i + 1 < 3; ++i)
        {
            const double lo = std::min(knots[i], R), hi = std::min(knots[i + 1], R);
            if (hi > lo)
                oracle += testing::simpson([&](double t) { return 2.0 * kPi * t * std::pow(k(t), -3.0); }, lo, hi, 200000);
        }
        CHECK(pk.mass_within(R) == Approx(oracle).epsilon(1e-8));
    }
    CHECK(pk.finite_mass());

    CHECK(RadialMeasure::lebesgue(3, 2.0).mass_within(kInf) == Approx(32.0 * kPi / 3.0));
    CHECK_FALSE(RadialMeasure::lebesgue(2).finite_mass());
}

TEST_CASE("level radii")
{
    const RadialMeasure g = RadialMeasure::gaussian(2, 1.0);
    for (double level : {0.9, 0.5, 1e-3})
        CHECK(g.level_radius(level) == Approx(std::sqrt(-2.0 * std::log(level))));
    CHECK(g.level_radius(2.0) == 0.0);
    const RadialMeasure leb = RadialMeasure::lebesgue(2, 3.0);
    CHECK(leb.level_radius(1.0) == 3.0);
    CHECK(leb.level_radius(0.5) == 3.0);
    CHECK(leb.level_radius(1.5) == 0.0);
}

TEST_CASE("hyperplane integrals")
{
    Vector z(2);
    const DensityOracle gauss = DensityOracle::gaussian_factor(2);
    const DensityOracle square = DensityOracle::cube_indicator(2);
    for (double phi : {0.0, 0.3, 1.0, 2.5})
    {
        z << std::cos(phi), std::sin(phi);
        CHECK(nu_plus_hyperplane(gauss, 3.0 * z) == Approx(std::sqrt(2.0 * kPi)).epsilon(1e-7));
    }
    z << 0, 1;
    CHECK(nu_plus_hyperplane(square, z) == Approx(2.0).epsilon(1e-7));
    z << 1, 1;
    CHECK(nu_plus_hyperplane(square, z / std::sqrt(2.0)) == Approx(2.0 * std::sqrt(2.0)).epsilon(1e-7));

    Vector w(3);
    w << 0.2, -0.4, 0.9;
    CHECK(nu_plus_hyperplane(DensityOracle::gaussian_factor(3), w) == Approx(2.0 * kPi).epsilon(1e-7));
    w << 0, 0, 1;
    CHECK(nu_plus_hyperplane(DensityOracle::cube_indicator(3), w) == Approx(4.0).epsilon(1e-7));
    CHECK(nu_plus_hyperplane(DensityOracle::ball_indicator(3), w) == Approx(kPi).epsilon(1e-7));
}
