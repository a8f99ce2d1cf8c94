#include "flp/sde.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "flp/rng.hpp"
#include "flp/volterra.hpp"

using namespace flp;

namespace {

DiscretizedMeasure unit_mark() {
  DiscretizedMeasure m;
  m.marks = {1.0};
  m.weights = {1.0};
  return m;
}

BasisPtr tiny_basis() {  // 2 cells x 2 marks, one solve cell, order 2
  const TimeGrid grid(-0.25, 0.25, 2);
  return make_basis(grid, sampling_measure(two_point_model(1.0, 1.0)), 2);
}

BasisPtr solver_basis() {  // h = 1/16, 8 solve cells, order 3
  const TimeGrid grid(-0.25, 0.5, 12);
  return make_basis(grid, sampling_measure(two_point_model(1.0, 1.0)), 3);
}

std::vector<MultiIndex> enumerate_order2(Index nb) {
  std::vector<MultiIndex> all;
  all.push_back(MultiIndex());
  for (Index a = 0; a < nb; ++a) all.push_back(MultiIndex::single(a));
  for (Index a = 0; a < nb; ++a)
    for (Index b = a; b < nb; ++b) all.push_back(MultiIndex::single(a).plus(b));
  return all;
}

Scalar rho_of(const MultiIndex& a, Scalar p) {
  Scalar w = 1.0;
  a.for_each_run([&](Index k, int count) {
    w *= std::pow(static_cast<Scalar>(k) + 2.0,
                  -2.0 * p * static_cast<Scalar>(count));
  });
  return w;
}

}  // namespace

TEST_CASE("coefficient report: zero coefficients give zero constants") {
  SdeProblem p;
  p.basis = tiny_basis();
  p.u0 = chaos_constant(p.basis, 1.0);
  const CoefficientReport rep = validate_coefficients(p, 2.0);
  CHECK(rep.lipschitz_b == 0.0);
  CHECK(rep.lipschitz_sigma == 0.0);
  CHECK(rep.c_eff == 0.0);
  CHECK(rep.noise_gauge_max == 0.0);
}

TEST_CASE("coefficient report scales linearly in the multiplier") {
  SdeProblem p;
  p.basis = tiny_basis();
  p.u0 = chaos_constant(p.basis, 1.0);
  p.b.c1 = chaos_constant(p.basis, 0.4);
  const Scalar l1 = validate_coefficients(p, 2.0).lipschitz_b;
  p.b.c1 = chaos_constant(p.basis, 0.8);
  const Scalar l2 = validate_coefficients(p, 2.0).lipschitz_b;
  CHECK(l1 == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(l2 == doctest::Approx(2.0 * l1).epsilon(1e-9));
}

TEST_CASE("the effective constant matches a dense svd on a tiny basis") {
  const BasisPtr basis = tiny_basis();
  const Scalar gauge_p = 2.0;
  SdeProblem p;
  p.basis = basis;
  p.beta = 0.25;
  p.u0 = chaos_constant(basis, 1.0);
  SplitMix64 rng(81);
  Arr cb = Arr::Zero(basis->n_basis()), cs = Arr::Zero(basis->n_basis());
  for (Index k = 0; k < basis->n_basis(); ++k) {
    cb[k] = 0.2 * rng.next_normal();
    cs[k] = 0.15 * rng.next_normal();
  }
  p.b.c1 = chaos_constant(basis, 0.3) + first_chaos(basis, cb);
  p.sigma.c1 = chaos_constant(basis, 0.2) + first_chaos(basis, cs);
  const CoefficientReport rep = validate_coefficients(p, gauge_p);
  REQUIRE(rep.noise_argmax >= 0);

  const ChaosElement xi = noise_element_time_avg(
      p.beta, p.first_solve_cell() + rep.noise_argmax, basis);
  const auto apply = [&](const ChaosElement& w) {
    ChaosElement out = wick_product(wick_product(p.sigma.c1, w), xi);
    out += wick_product(p.b.c1, w);
    return out;
  };

  const std::vector<MultiIndex> alphas = enumerate_order2(basis->n_basis());
  const auto dim = static_cast<Index>(alphas.size());
  REQUIRE(dim == 15);
  Mat M = Mat::Zero(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    ChaosElement e(basis);
    e.add_term(alphas[static_cast<std::size_t>(j)], 1.0);
    const ChaosElement te = apply(e);
    for (Index i = 0; i < dim; ++i)
      M(i, j) = te.coefficient(alphas[static_cast<std::size_t>(i)]);
  }
  Arr d(dim);
  for (Index i = 0; i < dim; ++i)
    d[i] = rho_of(alphas[static_cast<std::size_t>(i)], gauge_p);
  const Mat W = d.sqrt().matrix().asDiagonal() * M *
                d.sqrt().inverse().matrix().asDiagonal();
  const Scalar dense = W.jacobiSvd().singularValues()[0];

  CHECK(rep.c_eff <= dense * (1.0 + 1e-9));
  CHECK(rep.c_eff >= dense * 0.95);

  // no random state is expanded more than the dense norm allows
  for (int trial = 0; trial < 100; ++trial) {
    ChaosElement y(basis);
    for (int q = 0; q < 6; ++q)
      y.add_term(alphas[rng.next_u64() % alphas.size()], rng.next_normal());
    const Scalar ny = grid_proxy_norm(y, gauge_p);
    if (ny == 0.0) continue;
    CHECK(grid_proxy_norm(apply(y), gauge_p) <= dense * ny * (1.0 + 1e-9));
  }
}

TEST_CASE("the step guard rejects an explosive drift") {
  SdeProblem p;
  p.basis = solver_basis();  // h = 1/16
  p.u0 = chaos_constant(p.basis, 1.0);
  p.b.c1 = chaos_constant(p.basis, 16.0);  // h * c_eff = 1 >= 0.5
  try {
    (void)picard_solve(p, 1e-10, 20);
    FAIL("expected the step guard to fire");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("step guard") != std::string::npos);
  }
}

TEST_CASE("iteration exhaustion reports the last update and decay") {
  SdeProblem p;
  p.basis = solver_basis();
  p.u0 = chaos_constant(p.basis, 1.0);
  p.b.c1 = chaos_constant(p.basis, 2.0);
  try {
    (void)picard_solve(p, 1e-14, 2);
    FAIL("expected iteration exhaustion");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("did not reach") != std::string::npos);
  }
}

TEST_CASE("with zero coefficients the solution is the initial value") {
  const BasisPtr basis = tiny_basis();
  SdeProblem p;
  p.basis = basis;
  Arr c = Arr::Zero(basis->n_basis());
  c[1] = 0.3;
  p.u0 = chaos_constant(basis, 2.0) + first_chaos(basis, c);
  const SdeSolution sol = picard_solve(p, 1e-12, 10);
  CHECK(sol.converged);
  CHECK(sol.certified);
  for (const auto& u : sol.u)
    for (const auto& [a, v] : u.terms())
      CHECK(v == doctest::Approx(p.u0.coefficient(a)));
}

TEST_CASE("constant wick noise integrates to the wick exponential") {
  const BasisPtr basis = solver_basis();
  SdeProblem p;
  p.basis = basis;
  p.beta = 0.25;
  p.u0 = chaos_constant(basis, 1.0);
  p.sigma.c1 = chaos_constant(basis, 0.05);
  const SdeSolution sol = picard_solve(p, 1e-12, 60);
  REQUIRE(sol.converged);
  const auto probes = random_probes(basis, 6, 82, 0.3);
  Scalar worst = 0;
  for (Index i = 0; i < p.n_solve(); ++i) {
    const ChaosElement xhat = noise_prefix_integral(p.beta, basis, i);
    for (const TestFunction& eta : probes)
      worst = std::max(
          worst, std::fabs(s_transform(sol.u[static_cast<std::size_t>(i)], eta) -
                           std::exp(0.05 * s_transform(xhat, eta))));
  }
  // The fixed point of the discrete sweep is the wick exponential of the
  // trapezoid prefix integral only up to the O(h^2) composition gap.
  CHECK(worst < 1e-6);

  // decay ratios past the first few iterations stay below one
  for (Index k = 3; k < sol.update_norms.size(); ++k)
    if (sol.update_norms[k - 1] > 1e-11)
      CHECK(sol.update_norms[k] / sol.update_norms[k - 1] < 1.0);
}

TEST_CASE("two initial guesses converge to one fixed point") {
  const BasisPtr basis = solver_basis();
  SdeProblem p;
  p.basis = basis;
  p.beta = 0.25;
  p.u0 = chaos_constant(basis, 1.0);
  p.b.c1 = chaos_constant(basis, 0.3);
  p.sigma.c1 = chaos_constant(basis, 0.05);
  const SdeSolution a = picard_solve(p, 1e-13, 80);
  const ChaosElement zero(basis);
  const SdeSolution b = picard_solve(p, 1e-13, 80, &zero);
  const auto probes = random_probes(basis, 6, 83, 0.3);
  Scalar worst = 0;
  for (Index i = 0; i < p.n_solve(); ++i)
    for (const TestFunction& eta : probes)
      worst = std::max(
          worst, std::fabs(s_transform(a.u[static_cast<std::size_t>(i)], eta) -
                           s_transform(b.u[static_cast<std::size_t>(i)], eta)));
  CHECK(worst < 1e-9);
}

TEST_CASE("the affine solver agrees with the volterra formulation") {
  const BasisPtr basis = solver_basis();
  SdeProblem p;
  p.basis = basis;
  p.beta = 0.25;
  p.u0 = chaos_constant(basis, 1.0);
  p.b.c1 = chaos_constant(basis, 0.3);
  p.sigma.c1 = chaos_constant(basis, 0.05);
  const SdeSolution ssol = picard_solve(p, 1e-13, 80);

  VolterraProblem vp;
  vp.basis = basis;
  vp.beta = 0.25;
  vp.b = constant_kernel(0.3);
  vp.sigma = constant_kernel(0.05);
  vp.forcing.assign(static_cast<std::size_t>(vp.n_solve()),
                    chaos_constant(basis, 1.0));
  const VolterraSolution vsol =
      solve_volterra(vp, VolterraBackend::chaos_picard, 1e-13, 80);
  REQUIRE(vsol.converged);
  const auto probes = random_probes(basis, 6, 84, 0.3);
  Scalar worst = 0;
  for (Index i = 0; i < vp.n_solve(); ++i)
    for (const TestFunction& eta : probes)
      worst = std::max(
          worst,
          std::fabs(s_transform(ssol.u[static_cast<std::size_t>(i)], eta) -
                    s_transform(vsol.u[static_cast<std::size_t>(i)], eta)));
  CHECK(worst < 1e-8);
}

TEST_CASE("a pure drift problem integrates to the exponential") {
  const TimeGrid grid(0.0, 1.0, 500);
  const BasisPtr basis = make_basis(grid, unit_mark(), 2);
  SdeProblem p;
  p.basis = basis;
  p.u0 = chaos_constant(basis, 1.0);
  p.b.c1 = chaos_constant(basis, 1.0);
  const SdeSolution sol = picard_solve(p, 1e-12, 60);
  REQUIRE(sol.converged);
  Scalar worst = 0;
  for (Index i = 0; i < p.n_solve(); ++i) {
    const Scalar ref = std::exp(p.solve_time(i));
    worst = std::max(
        worst,
        std::fabs(sol.u[static_cast<std::size_t>(i)].constant_part() - ref) /
            ref);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("noise modulus: zero gap is exactly zero, symmetric otherwise") {
  CHECK(noise_difference_norm2(0.3, 2.0, 0.7, 0.7) == 0.0);
  const Scalar a = noise_difference_norm2(0.3, 2.0, 0.7, 0.5, 128);
  const Scalar b = noise_difference_norm2(0.3, 2.0, 0.5, 0.7, 128);
  CHECK(a > 0.0);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("the holder fit validates its sample of gaps") {
  std::vector<std::pair<Scalar, Scalar>> three = {
      {0.6, 0.5}, {0.7, 0.5}, {0.8, 0.5}};
  CHECK_THROWS_AS((void)holder_noise_check(0.3, 2.0, three, 64),
                  std::invalid_argument);
  std::vector<std::pair<Scalar, Scalar>> degenerate = {
      {0.6, 0.5}, {0.7, 0.5}, {0.8, 0.5}, {0.5, 0.5}};
  CHECK_THROWS_AS((void)holder_noise_check(0.3, 2.0, degenerate, 64),
                  std::invalid_argument);

  std::vector<std::pair<Scalar, Scalar>> pairs;
  for (int k = 0; k < 6; ++k)
    pairs.push_back({0.5 + 1e-2 * std::pow(10.0, k / 5.0), 0.5});
  const HolderReport hr = holder_noise_check(0.3, 2.0, pairs, 128);
  REQUIRE(hr.log_gap.size() == 6);
  for (Index k = 0; k < 6; ++k) {
    const Scalar direct = noise_difference_norm2(
        0.3, 2.0, pairs[static_cast<std::size_t>(k)].first,
        pairs[static_cast<std::size_t>(k)].second, 128);
    CHECK(hr.log_norm2[k] == doctest::Approx(std::log(direct)).epsilon(1e-10));
  }
}
