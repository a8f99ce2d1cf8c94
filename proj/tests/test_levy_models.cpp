#include "flp/levy_models.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "flp/quadrature.hpp"

using namespace flp;

TEST_CASE("two-point model: symmetric atoms with the advertised moments") {
  const LevyModel model = two_point_model(2.0, 0.5);
  const DiscretizedMeasure m = sampling_measure(model);
  REQUIRE(m.size() == 2);
  CHECK(m.total_mass() == doctest::Approx(2.0));
  CHECK(m.first_moment() == doctest::Approx(0.0));
  CHECK(m.second_moment() == doctest::Approx(2.0 * 0.25));
  CHECK(second_moment(model) == doctest::Approx(2.0 * 0.25));
  CHECK(m.m2_deficit == doctest::Approx(0.0));
}

TEST_CASE("gauss-mark discretization keeps the second moment") {
  const LevyModel model = gauss_mark_model(1.5, 0.7, 1e-3, 64);
  const Scalar exact = second_moment(model);
  const DiscretizedMeasure m = sampling_measure(model);
  CHECK(std::fabs(m.second_moment() - exact) / exact < 2e-3);
  CHECK(std::fabs(m.first_moment()) < 1e-12 * m.second_moment());
  CHECK(m.m2_deficit < 2e-3);
}

TEST_CASE("tempered-stable second moment matches direct quadrature") {
  const Scalar c = 0.8, decay = 2.0, eps = 1e-3;
  const LevyModel model = tempered_stable_model(c, decay, eps, 96);
  // nu(dx) = c exp(-decay |x|)/|x| dx on |x| >= eps, mirrored
  const Scalar ref =
      2.0 * adaptive_simpson(
                [&](Scalar x) { return c * std::exp(-decay * x) * x; }, eps,
                60.0, 1e-12);
  CHECK(second_moment(model) == doctest::Approx(ref).epsilon(1e-6));
  const DiscretizedMeasure m = sampling_measure(model);
  CHECK(std::fabs(m.second_moment() - ref) / ref < 5e-3);
}

TEST_CASE("increments replay exactly and are centered with the right scale") {
  const LevyModel model = two_point_model(3.0, 1.0);
  const TimeGrid grid(-1.0, 1.0, 32);
  const IncrementSample a = sample_increments(model, grid, 5150, 200);
  const IncrementSample b = sample_increments(model, grid, 5150, 200);
  CHECK((a.increments - b.increments).cwiseAbs().maxCoeff() == 0.0);

  const Index cells = a.increments.size();
  const Scalar mean = a.increments.sum() / static_cast<Scalar>(cells);
  const Scalar var =
      a.increments.array().square().sum() / static_cast<Scalar>(cells);
  const Scalar m2h = second_moment(model) * grid.h();
  CHECK(std::fabs(mean) < 4.0 * std::sqrt(m2h / static_cast<Scalar>(cells)));
  // relative 4-sigma band for a pooled variance of compound-poisson cells
  CHECK(std::fabs(var - m2h) / m2h < 0.1);
}

TEST_CASE("the jump visitor and the binned increments tell one story") {
  const LevyModel model = two_point_model(1.0, 2.0);
  const TimeGrid grid(0.0, 1.0, 16);
  const Index n_paths = 8;
  const IncrementSample inc = sample_increments(model, grid, 777, n_paths);

  Mat rebinned = Mat::Zero(n_paths, grid.n_cells());
  for_each_path_jumps(model, grid, 777, n_paths,
                      [&](Index p, const std::vector<Jump>& jumps) {
                        for (const Jump& j : jumps) rebinned(p, j.cell) += j.mark;
                      });
  // mean-zero mark measure: the compensator vanishes, so the bins match
  CHECK((rebinned - inc.increments).cwiseAbs().maxCoeff() < 1e-12);
}
