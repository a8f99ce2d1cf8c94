#include "flp/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace flp {

Scalar SplitMix64::next_normal() {
  const Scalar u1 = next_uniform();
  const Scalar u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {

// Knuth: count uniforms until their product drops below exp(-mean).
std::int64_t poisson_knuth(SplitMix64& g, Scalar mean) {
  const Scalar limit = std::exp(-mean);
  std::int64_t k = 0;
  Scalar prod = g.next_uniform();
  while (prod > limit) {
    ++k;
    prod *= g.next_uniform();
  }
  return k;
}

// Hormann (1993), PTRD: transformed rejection with squeeze.  Valid for
// mean >= 10; exact Poisson law, a handful of uniforms per draw.
std::int64_t poisson_ptrd(SplitMix64& g, Scalar mu) {
  const Scalar smu = std::sqrt(mu);
  const Scalar b = 0.931 + 2.53 * smu;
  const Scalar a = -0.059 + 0.02483 * b;
  const Scalar inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const Scalar v_r = 0.9277 - 3.6224 / (b - 2.0);

  while (true) {
    Scalar u;
    Scalar v = g.next_uniform();
    if (v <= 0.86 * v_r) {
      u = v / v_r - 0.43;
      return static_cast<std::int64_t>(
          std::floor((2.0 * a / (0.5 - std::fabs(u)) + b) * u + mu + 0.445));
    }
    if (v >= v_r) {
      u = g.next_uniform() - 0.5;
    } else {
      u = v / v_r - 0.93;
      u = (u < 0 ? -0.5 : 0.5) - u;
      v = g.next_uniform() * v_r;
    }
    const Scalar us = 0.5 - std::fabs(u);
    if (us < 0.013 && v > us) continue;
    const Scalar k =
        std::floor((2.0 * a / us + b) * u + mu + 0.445);
    v = v * inv_alpha / (a / (us * us) + b);
    // Stirling form of the exact acceptance v <= mu^k e^{-mu} / k!.
    const Scalar log_sqrt_2pi = 0.9189385332046727;
    if (k >= 10.0) {
      if (std::log(v * smu) <=
          (k + 0.5) * std::log(mu / k) - mu - log_sqrt_2pi + k -
              (1.0 / 12.0 - 1.0 / (360.0 * k * k)) / k) {
        return static_cast<std::int64_t>(k);
      }
    } else if (k >= 0.0) {
      // lgamma is fine here: k is a small nonnegative integer.
      if (std::log(v) <= k * std::log(mu) - mu - std::lgamma(k + 1.0)) {
        return static_cast<std::int64_t>(k);
      }
    }
  }
}

}  // namespace

std::int64_t SplitMix64::next_poisson(Scalar mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_knuth(*this, mean);
  return poisson_ptrd(*this, mean);
}

}  // namespace flp
