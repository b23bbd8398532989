#include "randpolar/rng.hpp"

#include <cmath>
#include <numbers>

namespace randpolar
{

RandomEngine::RandomEngine(RngStream s) noexcept
    : key_(mix64(mix64(s.seed + 0x9e3779b97f4a7c15ull)
                 ^ (s.stream * 0xd1b54a32d192ed03ull + 0x8cb92ba72f3d8dd7ull)))
{
}

double RandomEngine::normal() noexcept
{
    if (has_cached_)
    {
        has_cached_ = false;
        return cached_normal_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

}  // namespace randpolar
