#pragma once

// Test-side helpers: an RNG independent of the library's generator, seeded
// value generators for property tests, and small numeric oracles.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace testing
{

using Gen = std::mt19937_64;

inline double uniform(Gen& g, double lo = 0.0, double hi = 1.0)
{
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline Eigen::VectorXd gaussian_vector(Gen& g, std::size_t n)
{
    std::normal_distribution<double> nd;
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = nd(g);
    return v;
}

inline Eigen::VectorXd unit_vector(Gen& g, std::size_t n)
{
    Eigen::VectorXd v;
    do
        v = gaussian_vector(g, n);
    while (v.norm() < 1e-6);
    return v.normalized();
}

// Uniform in the Euclidean ball of the given radius, by rejection from the cube.
inline Eigen::VectorXd in_ball(Gen& g, std::size_t n, double radius = 1.0)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    do
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v(i) = uniform(g, -1.0, 1.0);
    while (v.squaredNorm() > 1.0);
    return radius * v;
}

// Composite midpoint rule on [a, b]; deliberately simple and independent of
// the library's adaptive quadrature.
inline double midpoint(const std::function<double(double)>& f, double a, double b, int cells)
{
    const double h = (b - a) / cells;
    double s = 0.0;
    for (int i = 0; i < cells; ++i)
        s += f(a + (i + 0.5) * h);
    return s * h;
}

// Composite Simpson rule on [a, b] with an even number of cells.
inline double simpson(const std::function<double(double)>& f, double a, double b, int cells)
{
    if (cells % 2)
        ++cells;
    const double h = (b - a) / cells;
    double s = f(a) + f(b);
    for (int i = 1; i < cells; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Fraction of a fine grid of [-L, L]^2 (cell centres) inside a set: area oracle.
inline double grid_area_2d(const std::function<bool(double, double)>& inside, double L, int cells)
{
    const double h = 2.0 * L / cells;
    long count = 0;
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j)
            if (inside(-L + (i + 0.5) * h, -L + (j + 0.5) * h))
                ++count;
    return static_cast<double>(count) * h * h;
}

}  // namespace testing
