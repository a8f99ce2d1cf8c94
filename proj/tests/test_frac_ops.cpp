#include "flp/frac_ops.hpp"

#include <cmath>

#include "doctest.h"
#include "flp/quadrature.hpp"
#include "flp/rng.hpp"

using namespace flp;

namespace {

Arr random_values(Index n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Arr v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.next_normal();
  return v;
}

}  // namespace

TEST_CASE("cell weights: closed form at lag zero, quadrature beyond") {
  const Scalar beta = 0.3, h = 0.1;
  const Arr w = rl_cell_weights(beta, h, 8);

  // W_0 = (1/h) int_0^h (h-t)^beta dt / Gamma(beta+1) = h^beta / Gamma(beta+2)
  CHECK(w[0] == doctest::Approx(std::pow(h, beta) / std::tgamma(beta + 2.0))
                    .epsilon(1e-13));

  // W_k (k >= 1) equals the smooth cell average of the integrated kernel.
  for (Index k = 1; k < 8; ++k) {
    const Scalar ref =
        adaptive_simpson(
            [&](Scalar t) {
              return std::pow((static_cast<Scalar>(k) + 1.0) * h - t, beta) -
                     std::pow(static_cast<Scalar>(k) * h - t, beta);
            },
            0.0, h, 1e-12) /
        (h * std::tgamma(beta + 1.0));
    CHECK(w[k] == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("direct and fft convolutions agree to rounding") {
  const TimeGrid grid(-1.0, 1.0, 200);
  const GridFunction f(grid, random_values(grid.n_cells(), 314));
  for (Side side : {Side::minus, Side::plus}) {
    const GridFunction a = rl_fractional_integral(f, 0.35, side, ConvMethod::direct);
    const GridFunction b = rl_fractional_integral(f, 0.35, side, ConvMethod::fft);
    const Scalar scale = a.values.abs().maxCoeff();
    CHECK((a.values - b.values).abs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("composition of two fractional integrals matches the combined order") {
  const TimeGrid grid(-2.0, 1.0, 600);
  Arr v = Arr::Zero(grid.n_cells());
  for (Index i = 0; i < grid.n_cells(); ++i) {
    const Scalar tau = (grid.center(i) + 0.5) / 0.4;
    if (std::fabs(tau) < 1.0) v[i] = std::exp(-1.0 / (1.0 - tau * tau));
  }
  const GridFunction f(grid, v);
  const GridFunction two =
      rl_fractional_integral(rl_fractional_integral(f, 0.2, Side::minus), 0.1,
                             Side::minus);
  const GridFunction one = rl_fractional_integral(f, 0.3, Side::minus);
  const Scalar rel = std::sqrt((two.values - one.values).square().sum() /
                               one.values.square().sum());
  CHECK(rel < 2e-2);
}

TEST_CASE("discrete duality pairing is exact for the Toeplitz weights") {
  const TimeGrid grid(-1.0, 1.0, 128);
  const GridFunction f(grid, random_values(grid.n_cells(), 21));
  const GridFunction g(grid, random_values(grid.n_cells(), 22));
  const Scalar h = grid.h();
  const Scalar lhs =
      h * (rl_fractional_integral(f, 0.3, Side::minus).values * g.values).sum();
  const Scalar rhs =
      h * (f.values * rl_fractional_integral(g, 0.3, Side::plus).values).sum();
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("pointwise value of the minus integral of an indicator") {
  const TimeGrid grid(-1.0, 1.0, 64);
  Arr v = Arr::Zero(grid.n_cells());
  for (Index i = 0; i < grid.n_cells(); ++i)
    if (grid.center(i) > 0.0) v[i] = 1.0;
  const GridFunction f(grid, v);
  // (I^beta_- 1_[0,1])(0) = int_0^1 s^{beta-1} ds / Gamma(beta) = 1/Gamma(beta+1)
  const Scalar beta = 0.25;
  CHECK(rl_pointwise(f, beta, Side::minus, 0.0) ==
        doctest::Approx(1.0 / std::tgamma(beta + 1.0)).epsilon(1e-12));
}

TEST_CASE("moving-average weights vanish at t = 0 and carry the L2 mass") {
  const TimeGrid grid(-2.0, 1.0, 192);
  const Scalar beta = 0.25;
  const GridFunction w0 = indicator_kernel_weights(0.0, beta, grid);
  CHECK(w0.values.abs().maxCoeff() == 0.0);

  const GridFunction w1 = indicator_kernel_weights(1.0, beta, grid);
  const TruncationReport rep = truncation_report(beta, 1.0, grid, 0.5);
  CHECK(grid.h() * w1.values.square().sum() ==
        doctest::Approx(rep.truncated_norm2).epsilon(1e-12));
}

TEST_CASE("truncation report inverts its own budget") {
  const TimeGrid grid(-2.0, 1.0, 96);
  const Scalar beta = 0.2, budget = 0.01;
  const TruncationReport rep = truncation_report(beta, 1.0, grid, budget);
  CHECK(rep.relative_deficit > budget);  // -2 is far too short for 1%
  CHECK(rep.required_t_min < grid.t_min());

  // A grid reaching the advertised t_min meets the budget.
  const Scalar span = 1.0 - rep.required_t_min;
  const auto n = static_cast<Index>(std::ceil(span / grid.h()));
  const TimeGrid wide(1.0 - static_cast<Scalar>(n) * grid.h(), 1.0, n);
  const TruncationReport ok = truncation_report(beta, 1.0, wide, budget);
  CHECK(ok.relative_deficit <= budget * 1.05);
}

TEST_CASE("the closed-form tail bound decreases in the cutoff") {
  const Scalar a = truncation_tail_bound(0.3, 1.0, -10.0);
  const Scalar b = truncation_tail_bound(0.3, 1.0, -100.0);
  CHECK(a > 0.0);
  CHECK(b < a);
}
