#include "flp/flp_simulate.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

using namespace flp;

TEST_CASE("paths vanish identically at the time origin") {
  const LevyModel model = two_point_model(1.0, 1.0);
  const TimeGrid grid(-2.0, 1.0, 96);
  const PathSample ps = simulate_flp_paths(model, grid, 0.25, 16, 101, 0.2);
  const Index e0 = grid.zero_edge_index();
  CHECK(ps.values.col(e0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ps.values.rows() == 16);
  CHECK(ps.values.cols() == grid.n_cells() + 1);
}

TEST_CASE("jump accumulation and the fft path builder agree") {
  const LevyModel model = two_point_model(1.0, 1.0);
  const TimeGrid grid(-2.0, 1.0, 96);
  const Scalar beta = 0.25;
  const PathSample ps = simulate_flp_paths(model, grid, beta, 20, 2024, 0.2);
  const std::vector<Scalar> ts = {0.5, 1.0};
  const Mat obs = observe_flp_at(model, grid, beta, ts, 20, 2024, 0.2);
  for (std::size_t q = 0; q < ts.size(); ++q) {
    const Index edge =
        static_cast<Index>(std::llround((ts[q] - grid.t_min()) / grid.h()));
    CHECK((obs.col(static_cast<Index>(q)) - ps.values.col(edge))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
  }
}

TEST_CASE("monte-carlo variance sits on the quadrature oracle") {
  const LevyModel model = two_point_model(1.0, 1.0);
  const TimeGrid grid(-8.0, 1.0, 288);
  const Scalar beta = 0.3;
  const Mat vals = observe_flp_at(model, grid, beta, {1.0}, 4000, 31337, 0.2);
  const MomentTable mt = empirical_moments_of(vals, {1.0});
  const Scalar oracle = sampling_measure(model).second_moment() *
                        indicator_norm2_quadrature(beta, 1.0, grid.t_min());
  CHECK(std::fabs(mt.variance[0] - oracle) <= 4.0 * mt.stderr_var[0]);
  CHECK(std::fabs(mt.mean[0]) <= 4.0 * mt.stderr_mean[0]);
}

TEST_CASE("an over-budget truncation names the cutoff that would do") {
  const LevyModel model = two_point_model(1.0, 1.0);
  const TimeGrid grid(-2.0, 1.0, 96);
  try {
    simulate_flp_paths(model, grid, 0.25, 2, 1, 1e-4);
    FAIL("expected a truncation-budget failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("t_min") != std::string::npos);
  }
}

TEST_CASE("order transport reproduces a directly simulated process") {
  const LevyModel model = two_point_model(1.0, 1.0);
  const TimeGrid grid(-2.0, 1.0, 192);
  const PathSample lo = simulate_flp_paths(model, grid, 0.1, 4, 909, 0.5);
  const PathSample hi = simulate_flp_paths(model, grid, 0.3, 4, 909, 0.5);
  const PathSample moved = transform_alpha_to_beta(lo, 0.1, 0.3);
  CHECK(moved.beta == doctest::Approx(0.3));
  const Scalar rel = (moved.values - hi.values).cwiseAbs().maxCoeff() /
                     hi.values.cwiseAbs().maxCoeff();
  CHECK(rel < 0.25);  // coarse grid smoke bound; the fine-grid check is h=1e-3
}

TEST_CASE("unbiased variance on a hand-computed sample") {
  Mat cols(3, 1);
  cols << 1.0, 2.0, 4.0;
  const MomentTable mt = empirical_moments_of(cols, {0.5});
  CHECK(mt.mean[0] == doctest::Approx(7.0 / 3.0));
  CHECK(mt.variance[0] == doctest::Approx(7.0 / 3.0));  // sum sq dev 14/3 / 2
  CHECK(mt.t[0] == doctest::Approx(0.5));
}

TEST_CASE("the norm quadrature has the closed form on a trivial window") {
  // A vanishing left window leaves only the (t-s)^beta branch, whose square
  // integrates in closed form.
  const Scalar beta = 0.25, t = 1.0;
  const Scalar ref =
      1.0 / ((2.0 * beta + 1.0) * std::pow(std::tgamma(beta + 1.0), 2));
  CHECK(indicator_norm2_quadrature(beta, t, -1e-12) ==
        doctest::Approx(ref).epsilon(1e-9));
}
