#pragma once

#include <cstdint>
#include <limits>

namespace randpolar
{

// Stateless 64-bit mixer (SplitMix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/*!
 * Identifies one reproducible random sequence.
 *
 * A stream is a value: (seed, stream) fully determines the numbers drawn from
 * it. Child streams are derived by hashing, so chunk k of a computation can
 * be handed stream `parent.substream(k)` without any shared state.
 */
struct RngStream
{
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    RngStream substream(std::uint64_t index) const noexcept
    {
        return {seed, mix64(stream ^ mix64(index + 0x632be59bd9b4e019ull))};
    }

    friend bool operator==(const RngStream&, const RngStream&) = default;
};

/*!
 * Counter-based generator: output k is mix64(key + k * gamma), where the key
 * is a hash of (seed, stream). Satisfies UniformRandomBitGenerator.
 */
class RandomEngine
{
  public:
    using result_type = std::uint64_t;

    explicit RandomEngine(RngStream s) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept
    {
        return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ull);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept
    {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1].
    double uniform_pos() noexcept { return 1.0 - uniform(); }

    // Standard normal via Box-Muller; the second variate is cached.
    double normal() noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace randpolar
