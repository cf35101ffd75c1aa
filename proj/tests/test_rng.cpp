#include <gtest/gtest.h>

#include <set>

#include "billiards/rng.hpp"
#include "billiards/estimate.hpp"

using namespace billiards;

// Known-answer vectors of the Random123 distribution for philox4x64-10.
TEST(Philox, KnownAnswerZero) {
  const auto r = philox4x64({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(r[0], 0x16554d9eca36314cULL);
  EXPECT_EQ(r[1], 0xdb20fe9d672d0fdcULL);
  EXPECT_EQ(r[2], 0xd7e772cee186176bULL);
  EXPECT_EQ(r[3], 0x7e68b68aec7ba23bULL);
}

TEST(Philox, KnownAnswerOnes) {
  const std::uint64_t f = ~0ULL;
  const auto r = philox4x64({f, f, f, f}, {f, f});
  EXPECT_EQ(r[0], 0x87b092c3013fe90bULL);
  EXPECT_EQ(r[1], 0x438c3c67be8d0224ULL);
  EXPECT_EQ(r[2], 0x9cc7d7c69cd777b6ULL);
  EXPECT_EQ(r[3], 0xa09caebf594f0ba0ULL);
}

TEST(Philox, KnownAnswerPi) {
  const auto r = philox4x64({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL},
                            {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL});
  EXPECT_EQ(r[0], 0xa528f45403e61d95ULL);
  EXPECT_EQ(r[1], 0x38c72dbd566e9788ULL);
  EXPECT_EQ(r[2], 0xa5a1610e72fd18b5ULL);
  EXPECT_EQ(r[3], 0x57bd43b5e52b7fe6ULL);
}

TEST(CounterRng, SameAddressSameStream) {
  CounterRng a(7, 3, 99), b(7, 3, 99);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(CounterRng, AddressesAreDistinct) {
  std::set<std::uint64_t> first;
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    for (std::uint64_t stream = 0; stream < 4; ++stream)
      for (std::uint64_t idx = 0; idx < 16; ++idx) first.insert(CounterRng(seed, stream, idx).next_u64());
  EXPECT_EQ(first.size(), 4u * 4u * 16u);
}

TEST(CounterRng, UniformMoments) {
  CounterRng rng(1, 0, 0);
  Estimate u, g;
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double x = rng.uniform();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    u.add(x);
    g.add(rng.normal());
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(u.mean(), 0.5, 4.0 * std::sqrt(1.0 / 12.0 / 200000));
  EXPECT_NEAR(u.variance(), 1.0 / 12.0, 2e-3);
  EXPECT_NEAR(g.mean(), 0.0, 4.0 / std::sqrt(200000.0));
  EXPECT_NEAR(g.variance(), 1.0, 0.02);
}

TEST(CounterRng, OpenIntervalNeverZero) {
  CounterRng rng(0, 0, 0);
  for (int i = 0; i < 100000; ++i) {
    const double x = rng.uniform_open();
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
}

TEST(CounterRng, DifferentSeedsDoNotOverlap) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed : {1u, 2u})
    for (std::uint64_t i = 0; i < 5000; ++i) {
      CounterRng rng(seed, streams::boundary_sampler, i);
      EXPECT_TRUE(seen.insert(rng.next_u64()).second);
    }
}
