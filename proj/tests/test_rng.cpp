#include <atomic>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "randpolar/parallel.hpp"
#include "randpolar/rng.hpp"

using namespace randpolar;

TEST_CASE("identical seed and stream give identical sequences")
{
    RandomEngine a(RngStream{42, 7}), b(RngStream{42, 7});
    for (int i = 0; i < 1000; ++i)
        CHECK(a() == b());
}

TEST_CASE("different streams and seeds give different sequences")
{
    RandomEngine a(RngStream{42, 7}), b(RngStream{42, 8}), c(RngStream{43, 7});
    int same_ab = 0, same_ac = 0;
    for (int i = 0; i < 1000; ++i)
    {
        const auto x = a(), y = b(), z = c();
        same_ab += x == y;
        same_ac += x == z;
    }
    CHECK(same_ab == 0);
    CHECK(same_ac == 0);
}

TEST_CASE("substreams are deterministic and distinct")
{
    const RngStream s{5, 2};
    CHECK(s.substream(3) == s.substream(3));
    CHECK_FALSE(s.substream(3) == s.substream(4));
    CHECK_FALSE(s.substream(0) == s);
    CHECK(s.substream(1).seed == s.seed);
}

TEST_CASE("uniform variates lie in their ranges and have mean 1/2")
{
    RandomEngine e(RngStream{1, 0});
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double u = e.uniform();
        const double v = e.uniform_pos();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
        sum += u;
    }
    const double se = std::sqrt(1.0 / 12.0 / n);
    CHECK(std::abs(sum / n - 0.5) <= 4.0 * se);
}

TEST_CASE("normal variates have mean 0 and variance 1")
{
    RandomEngine e(RngStream{9, 1});
    const int n = 200000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double z = e.normal();
        s1 += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    CHECK(std::abs(s1 / n) <= 4.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) <= 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(s4 / n - 3.0) <= 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("distinct streams pass a mean-difference sanity test")
{
    const int n = 100000;
    for (std::uint64_t s = 0; s < 5; ++s)
    {
        RandomEngine a(RngStream{s, 0}), b(RngStream{s, 1});
        double da = 0.0, db = 0.0;
        for (int i = 0; i < n; ++i)
        {
            da += a.uniform();
            db += b.uniform();
        }
        const double se = std::sqrt(2.0 / 12.0 / n);
        CHECK(std::abs(da / n - db / n) <= 4.5 * se);
    }
}

TEST_CASE("parallel_for visits every index exactly once")
{
    for (unsigned threads : {1u, 2u, 7u})
    {
        std::vector<std::atomic<int>> hits(1000);
        parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](const auto& h) { return h.load() == 1; }));
    }
}

TEST_CASE("parallel_for rethrows worker exceptions")
{
    CHECK_THROWS_AS(parallel_for(50, 4,
                                 [](std::size_t i) {
                                     if (i == 17)
                                         throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}
