#include "flp/skorohod.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "flp/flp_simulate.hpp"
#include "flp/rng.hpp"

using namespace flp;

namespace {

ChaosElement random_element(const BasisPtr& basis, SplitMix64& rng,
                            int max_ord, Index n_terms, Scalar scale) {
  ChaosElement e(basis);
  const auto nb = static_cast<std::uint64_t>(basis->n_basis());
  for (Index q = 0; q < n_terms; ++q) {
    const int ord =
        static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_ord + 1));
    MultiIndex a;
    for (int i = 0; i < ord; ++i)
      a = a.plus(static_cast<Index>(rng.next_u64() % nb));
    e.add_term(a, scale * rng.next_normal());
  }
  return e;
}

}  // namespace

TEST_CASE("the skorohod shift identity holds exactly under the s-transform") {
  const TimeGrid grid(0.0, 1.0, 4);
  const BasisPtr basis =
      make_basis(grid, sampling_measure(two_point_model(1.0, 1.0)), 6);
  SplitMix64 rng(60);
  std::vector<ChaosElement> family;
  for (Index k = 0; k < basis->n_basis(); ++k)
    family.push_back(random_element(basis, rng, 2, 6, 0.5));
  const ChaosElement d = skorohod_pjm(basis, family);
  REQUIRE_FALSE(d.overflow());
  for (const TestFunction& eta : random_probes(basis, 8, 61, 0.4)) {
    Scalar ref = 0;
    for (Index k = 0; k < basis->n_basis(); ++k)
      ref += eta.coeffs[k] * std::sqrt(basis->pi_weight(k)) *
             s_transform(family[static_cast<std::size_t>(k)], eta);
    CHECK(std::fabs(s_transform(d, eta) - ref) < 1e-12);
  }
}

TEST_CASE("kernel-first and noise-first fractional integrals coincide") {
  const TimeGrid grid(-0.5, 0.75, 10);
  const BasisPtr basis =
      make_basis(grid, sampling_measure(two_point_model(1.0, 1.0)), 4);
  SplitMix64 rng(62);
  TimeFamily family;
  for (Index i = 0; i < grid.n_cells(); ++i)
    family.push_back(random_element(basis, rng, 2, 5, 0.5));
  const ChaosElement a = skorohod_frac(0.25, family, basis);
  const ChaosElement b =
      skorohod_pjm(basis, frac_kernel_family(0.25, family, basis));
  for (const TestFunction& eta : random_probes(basis, 8, 63, 0.3))
    CHECK(std::fabs(s_transform(a, eta) - s_transform(b, eta)) < 1e-8);
}

TEST_CASE("a deterministic indicator integrand rebuilds the process element") {
  const TimeGrid grid(-2.0, 1.0, 96);
  const BasisPtr basis =
      make_basis(grid, sampling_measure(two_point_model(1.0, 1.0)), 2);
  const Scalar beta = 0.25, t = 1.0;
  Arr ind = Arr::Zero(grid.n_cells());
  for (Index i = 0; i < grid.n_cells(); ++i)
    if (grid.center(i) > 0.0 && grid.center(i) < t) ind[i] = 1.0;
  const GridFunction g(grid, ind);

  const ChaosElement via_wiener = wiener_integral_element(g, beta, basis);
  const ChaosElement direct = indicator_chaos_element(beta, t, basis);
  Scalar worst = 0;
  for (const auto& [a, v] : direct.terms())
    worst = std::max(worst, std::fabs(via_wiener.coefficient(a) - v));
  CHECK(worst < 1e-13);

  const ChaosElement via_family =
      skorohod_frac(beta, deterministic_family(basis, g), basis);
  for (const auto& [a, v] : direct.terms())
    CHECK(via_family.coefficient(a) == doctest::Approx(v).epsilon(1e-11));
}

TEST_CASE("the pathwise wiener integral of the indicator is the process") {
  const LevyModel model = two_point_model(1.0, 1.0);
  const TimeGrid grid(-2.0, 1.0, 96);
  const Scalar beta = 0.25;
  const IncrementSample inc = sample_increments(model, grid, 515, 12);
  Arr ind = Arr::Zero(grid.n_cells());
  for (Index i = 0; i < grid.n_cells(); ++i)
    if (grid.center(i) > 0.0) ind[i] = 1.0;
  const Arr vals = wiener_integral_pathwise(GridFunction(grid, ind), beta, inc);

  const PathSample ps = simulate_flp_paths(model, grid, beta, 12, 515, 0.2);
  const Arr at_end = ps.values.col(grid.n_cells()).array();
  CHECK((vals - at_end).abs().maxCoeff() < 1e-10);
}

TEST_CASE("pathwise wiener integrals have the isometry variance") {
  const LevyModel model = two_point_model(1.0, 1.0);
  const TimeGrid grid(-2.0, 1.0, 192);
  const Scalar beta = 0.3;
  Arr v = Arr::Zero(grid.n_cells());
  for (Index i = 0; i < grid.n_cells(); ++i) {
    const Scalar tau = (grid.center(i) - 0.2) / 0.5;
    if (std::fabs(tau) < 1.0) v[i] = std::exp(-1.0 / (1.0 - tau * tau));
  }
  const GridFunction g(grid, v);
  const IncrementSample inc = sample_increments(model, grid, 808, 4000);
  const Arr vals = wiener_integral_pathwise(g, beta, inc);
  const MomentTable mt = empirical_moments_of(vals.matrix(), {1.0});
  const GridFunction ig = rl_fractional_integral(g, beta, Side::minus);
  const Scalar predicted = sampling_measure(model).second_moment() * grid.h() *
                           ig.values.square().sum();
  CHECK(std::fabs(mt.variance[0] - predicted) <= 4.0 * mt.stderr_var[0]);
}

TEST_CASE("skorohod integrals are linear and additive over time windows") {
  const TimeGrid grid(0.0, 1.0, 6);
  const BasisPtr basis =
      make_basis(grid, sampling_measure(two_point_model(1.0, 1.0)), 4);
  SplitMix64 rng(64);
  TimeFamily fam_f, fam_g;
  for (Index i = 0; i < grid.n_cells(); ++i) {
    fam_f.push_back(random_element(basis, rng, 2, 5, 0.5));
    fam_g.push_back(random_element(basis, rng, 2, 5, 0.5));
  }
  TimeFamily fam_sum;
  for (Index i = 0; i < grid.n_cells(); ++i)
    fam_sum.push_back(fam_f[static_cast<std::size_t>(i)] * 2.0 +
                      fam_g[static_cast<std::size_t>(i)] * (-0.5));
  const ChaosElement combined = skorohod_frac(0.25, fam_sum, basis);
  const ChaosElement split = skorohod_frac(0.25, fam_f, basis) * 2.0 +
                             skorohod_frac(0.25, fam_g, basis) * (-0.5);
  for (const auto& [a, vv] : split.terms())
    CHECK(combined.coefficient(a) == doctest::Approx(vv).epsilon(1e-12).scale(1e-12));

  Arr left = Arr::Zero(grid.n_cells()), right = Arr::Zero(grid.n_cells());
  for (Index i = 0; i < grid.n_cells(); ++i)
    (i < 3 ? left : right)[i] = grid.h();
  const ChaosElement a = skorohod_frac(0.25, fam_f, basis, &left);
  const ChaosElement b = skorohod_frac(0.25, fam_f, basis, &right);
  const ChaosElement whole = skorohod_frac(0.25, fam_f, basis);
  const ChaosElement sum = a + b;
  for (const auto& [al, vv] : whole.terms())
    CHECK(sum.coefficient(al) == doctest::Approx(vv).epsilon(1e-12).scale(1e-12));
}

TEST_CASE("the order transform rejects an inverted order pair") {
  const TimeGrid grid(0.0, 1.0, 4);
  const BasisPtr basis =
      make_basis(grid, sampling_measure(two_point_model(1.0, 1.0)), 2);
  TimeFamily fam(static_cast<std::size_t>(grid.n_cells()),
                 chaos_constant(basis, 1.0));
  CHECK_THROWS_AS(
      (void)fractional_transform_integrand(fam, 0.3, 0.1, basis),
      std::invalid_argument);
}

TEST_CASE("operator-level order transport on a coarse grid") {
  const TimeGrid grid(-2.0, 1.0, 300);
  DiscretizedMeasure one;
  one.marks = {1.0};
  one.weights = {1.0};
  const BasisPtr basis = make_basis(grid, one, 2);
  Arr v = Arr::Zero(grid.n_cells());
  for (Index i = 0; i < grid.n_cells(); ++i) {
    const Scalar tau = (grid.center(i) - 0.4) / 0.3;
    if (std::fabs(tau) < 1.0) v[i] = std::exp(-1.0 / (1.0 - tau * tau));
  }
  const GridFunction g(grid, v);
  const TimeFamily fam = deterministic_family(basis, g);
  const ChaosElement hi = skorohod_frac(0.3, fam, basis);
  const ChaosElement lo = skorohod_frac(
      0.1, fractional_transform_integrand(fam, 0.1, 0.3, basis), basis);
  Arr ch = Arr::Zero(basis->n_basis()), cl = Arr::Zero(basis->n_basis());
  for (const auto& [a, vv] : hi.terms())
    if (a.order() == 1) ch[a.slot(0)] = vv;
  for (const auto& [a, vv] : lo.terms())
    if (a.order() == 1) cl[a.slot(0)] = vv;
  CHECK((ch - cl).abs().maxCoeff() / ch.abs().maxCoeff() < 0.2);
}
