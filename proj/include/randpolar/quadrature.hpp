#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <limits>
#include <vector>

#include "randpolar/error.hpp"

namespace randpolar
{

struct QuadOptions
{
    double rel_tol = 1e-7;
    double abs_tol = 1e-14;
    std::size_t max_intervals = 100000;
    // Uniform subdivision depth before adaptivity kicks in; guards against
    // narrow features that all five Simpson nodes of a coarse cell miss.
    int min_depth = 6;
    // Intervals narrower than this fraction of [a, b] are accepted as-is, so
    // jump discontinuities terminate with an O(width) error.
    double min_width_fraction = 0x1.0p-44;
};

struct QuadResult
{
    double value = 0.0;
    double error = 0.0;
    std::size_t intervals = 0;
    bool converged = true;
};

namespace detail
{
struct SimpsonCell
{
    double a, b, fa, fm, fb, whole;
};

template<class F>
SimpsonCell make_cell(F& f, double a, double b, double fa, double fb)
{
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    return {a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb)};
}
}  // namespace detail

/*!
 * Adaptive Simpson quadrature on a finite interval.
 *
 * The tolerance budget max(abs_tol, rel_tol*|I|) is distributed over cells in
 * proportion to their width. Returns converged=false when the interval cap is
 * exhausted; callers decide whether that is fatal.
 */
template<class F>
QuadResult adaptive_simpson(F&& f, double a, double b, const QuadOptions& opt = {})
{
    QuadResult result;
    if (a == b)
        return result;
    double sign = 1.0;
    if (b < a)
    {
        std::swap(a, b);
        sign = -1.0;
    }
    const double length = b - a;

    std::vector<detail::SimpsonCell> stack;
    const std::size_t initial = std::size_t{1} << opt.min_depth;
    std::vector<double> nodes(initial + 1);
    for (std::size_t i = 0; i <= initial; ++i)
        nodes[i] = f(a + length * static_cast<double>(i) / static_cast<double>(initial));
    double rough = 0.0;
    for (std::size_t i = initial; i-- > 0;)
    {
        const double lo = a + length * static_cast<double>(i) / static_cast<double>(initial);
        const double hi = (i + 1 == initial)
                              ? b
                              : a + length * static_cast<double>(i + 1)
                                        / static_cast<double>(initial);
        stack.push_back(detail::make_cell(f, lo, hi, nodes[i], nodes[i + 1]));
        rough += stack.back().whole;
    }
    const double budget = std::max(opt.abs_tol, opt.rel_tol * std::abs(rough));
    const double min_width = length * opt.min_width_fraction;

    double sum = 0.0;
    double err = 0.0;
    std::size_t cells = stack.size();
    while (!stack.empty())
    {
        const detail::SimpsonCell c = stack.back();
        stack.pop_back();
        const double m = 0.5 * (c.a + c.b);
        detail::SimpsonCell left = detail::make_cell(f, c.a, m, c.fa, c.fm);
        detail::SimpsonCell right = detail::make_cell(f, m, c.b, c.fm, c.fb);
        const double refined = left.whole + right.whole;
        const double delta = refined - c.whole;
        const double local_tol = budget * (c.b - c.a) / length;
        if (std::abs(delta) <= 15.0 * local_tol || (c.b - c.a) <= min_width
            || cells >= opt.max_intervals)
        {
            if (cells >= opt.max_intervals && std::abs(delta) > 15.0 * local_tol
                && (c.b - c.a) > min_width)
                result.converged = false;
            sum += refined + delta / 15.0;
            err += std::abs(delta) / 15.0;
            continue;
        }
        ++cells;
        stack.push_back(right);
        stack.push_back(left);
    }
    result.value = sign * sum;
    result.error = err;
    result.intervals = cells;
    return result;
}

// Like adaptive_simpson but throws NumericalError on non-convergence or a
// non-finite result.
template<class F>
double integrate(F&& f, double a, double b, const QuadOptions& opt = {})
{
    const QuadResult r = adaptive_simpson(f, a, b, opt);
    if (!r.converged || !std::isfinite(r.value))
        throw NumericalError("quadrature did not converge on [" + std::to_string(a)
                             + ", " + std::to_string(b) + "]");
    return r.value;
}

/*!
 * Integral over [a, +inf) or (-inf, +inf) via the substitutions
 * x = a + s/(1-s) and x = s/(1-s^2). Endpoint singularities of the
 * transformed integrand are avoided by evaluating slightly inside.
 */
template<class F>
double integrate_half_line(F&& f, double a, const QuadOptions& opt = {})
{
    auto g = [&](double s) {
        s = std::min(s, 1.0 - 1e-9);
        const double one_minus = 1.0 - s;
        return f(a + s / one_minus) / (one_minus * one_minus);
    };
    return integrate(g, 0.0, 1.0, opt);
}

template<class F>
double integrate_real_line(F&& f, const QuadOptions& opt = {})
{
    auto g = [&](double s) {
        s = std::clamp(s, -1.0 + 1e-9, 1.0 - 1e-9);
        const double d = 1.0 - s * s;
        return f(s / d) * (1.0 + s * s) / (d * d);
    };
    return integrate(g, -1.0, 1.0, opt);
}

// Integral over [lo, hi] where either bound may be infinite.
template<class F>
double integrate_range(F&& f, double lo, double hi, const QuadOptions& opt = {})
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (lo == -inf && hi == inf)
        return integrate_real_line(f, opt);
    if (hi == inf)
        return integrate_half_line(f, lo, opt);
    if (lo == -inf)
        return integrate_half_line([&](double x) { return f(-x); }, -hi, opt);
    return integrate(f, lo, hi, opt);
}

}  // namespace randpolar
