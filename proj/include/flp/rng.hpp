#pragma once

#include <cstdint>

#include "flp/types.hpp"

namespace flp {

// splitmix64: tiny splittable generator with a fixed, implementation-defined-
// free output sequence.  Seeding contract used throughout this project:
//
//   stream(seed, id) starts from splitmix64 state  seed + mix(GOLDEN * (id+1))
//
// Every stream's state walks in steps of GOLDEN, so stream starts must not be
// small GOLDEN multiples apart: scrambling the id through the output mix
// places them pseudo-randomly, and distinct stream ids (path index,
// experiment tag, ...) give decorrelated, reproducible streams for the same
// top-level seed.  All sampling below is built on this generator only;
// nothing depends on std::random distributions, which keeps byte-level
// determinism a property of this code base.
class SplitMix64 {
 public:
  static constexpr std::uint64_t GOLDEN = 0x9e3779b97f4a7c15ull;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_id) {
    return SplitMix64(seed + mix(GOLDEN * (stream_id + 1)));
  }

  std::uint64_t next_u64() { return mix(state_ += GOLDEN); }

  // Uniform in (0,1); 53-bit mantissa, never exactly 0 or 1.
  Scalar next_uniform() {
    return (static_cast<Scalar>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on our own uniforms (deterministic).
  Scalar next_normal();

  // Poisson(mean): Knuth product-of-uniforms for small means, Hormann's PTRD
  // transformed-rejection for large ones.  Exact distribution, deterministic
  // draw sequence.  mean = 0 returns exactly 0.
  std::int64_t next_poisson(Scalar mean);

 private:
  std::uint64_t state_;
};

}  // namespace flp
