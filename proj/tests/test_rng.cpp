#include "flp/rng.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"

using flp::Scalar;
using flp::SplitMix64;

TEST_CASE("splitmix64 matches the published reference sequence") {
  SplitMix64 rng(0);
  CHECK(rng.next_u64() == 0xe220a8397b1dcdafull);
  CHECK(rng.next_u64() == 0x6e789e6aa1b965f4ull);
  CHECK(rng.next_u64() == 0x06c45d188009454full);
}

TEST_CASE("streams start at the documented scrambled state") {
  SplitMix64 a = SplitMix64::stream(42, 0);
  SplitMix64 b(42 + SplitMix64::mix(SplitMix64::GOLDEN));
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("neighbor streams do not share a shifted draw sequence") {
  // Each stream's state advances by GOLDEN, so unscrambled starts id*GOLDEN
  // apart would replay each other off by one; scrambled starts must not.
  for (std::uint64_t id = 0; id < 64; ++id) {
    SplitMix64 a = SplitMix64::stream(9001, id);
    SplitMix64 b = SplitMix64::stream(9001, id + 1);
    std::vector<std::uint64_t> seq_a(48), seq_b(48);
    for (auto& x : seq_a) x = a.next_u64();
    for (auto& x : seq_b) x = b.next_u64();
    int collisions = 0;
    for (int lag = -4; lag <= 4; ++lag)
      for (int i = 8; i < 40; ++i)
        if (seq_a[static_cast<std::size_t>(i)] ==
            seq_b[static_cast<std::size_t>(i + lag)])
          ++collisions;
    CHECK(collisions == 0);
  }
}

TEST_CASE("uniforms stay strictly inside (0,1) with the right mean") {
  SplitMix64 rng(7);
  Scalar sum = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Scalar u = rng.next_uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::fabs(sum / n - 0.5) < 0.01);  // ~5 sigma of a U(0,1) mean
}

TEST_CASE("normals have the right first two moments and replay exactly") {
  SplitMix64 rng(11);
  const int n = 20000;
  Scalar s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const Scalar x = rng.next_normal();
    s1 += x;
    s2 += x * x;
  }
  const Scalar mean = s1 / n;
  const Scalar var = s2 / n - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<Scalar>(n)));
  CHECK(std::fabs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));

  SplitMix64 r1(99), r2(99);
  for (int i = 0; i < 100; ++i) CHECK(r1.next_normal() == r2.next_normal());
}

TEST_CASE("poisson sampling covers both regimes and the zero mean") {
  SplitMix64 rng(13);
  CHECK(rng.next_poisson(0.0) == 0);

  const int n = 20000;
  for (Scalar mean : {3.7, 400.0}) {
    SplitMix64 r(17);
    Scalar sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<Scalar>(r.next_poisson(mean));
      REQUIRE(k >= 0);
      sum += k;
      sum2 += k * k;
    }
    const Scalar m = sum / n;
    const Scalar v = sum2 / n - m * m;
    CHECK(std::fabs(m - mean) < 4.0 * std::sqrt(mean / n));
    CHECK(std::fabs(v - mean) < 0.1 * mean);
  }
}
