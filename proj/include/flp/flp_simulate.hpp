#pragma once

#include <cstdint>
#include <vector>

#include "flp/frac_ops.hpp"
#include "flp/levy_models.hpp"
#include "flp/types.hpp"

namespace flp {

// Paths of the fractional process X^beta on [t_min, t_max], stored at all
// cell edges (n_cells + 1 values per path).  X^beta is exactly zero at the
// edge carrying t = 0 by construction of the moving-average kernel.
struct PathSample {
  TimeGrid grid;
  Scalar beta = 0;
  Mat values;  // n_paths x (n_cells + 1), column e = value at edge(e)
  std::uint64_t seed = 0;
  TruncationReport truncation;
};

struct MomentTable {
  std::vector<Scalar> t;
  std::vector<Scalar> mean;
  std::vector<Scalar> variance;    // unbiased
  std::vector<Scalar> stderr_mean;
  std::vector<Scalar> stderr_var;  // moment-based SE of the variance estimate
};

// Wiener sums X^beta_t = sum_j M-cell-average(t, cell j) * dX_j evaluated at
// every edge via one FFT pass per path.  Throws if the truncation deficit at
// t_max exceeds deficit_budget; the message names the t_min that would do.
PathSample simulate_flp_paths(const LevyModel& model, const TimeGrid& grid,
                              Scalar beta, Index n_paths, std::uint64_t seed,
                              Scalar deficit_budget = 0.01);

// Same law, evaluated only at the requested times: accumulates
// weight[cell(jump)] * mark per jump, so the cost per path is the jump count,
// not the cell count.  Used by the large Monte-Carlo checks.
Mat observe_flp_at(const LevyModel& model, const TimeGrid& grid, Scalar beta,
                   const std::vector<Scalar>& ts, Index n_paths,
                   std::uint64_t seed, Scalar deficit_budget = 0.01);

// Rebuild X^beta from the increments of an already-simulated X^alpha by a
// second moving-average pass of order beta - alpha (requires beta > alpha).
PathSample transform_alpha_to_beta(const PathSample& alpha_paths, Scalar alpha,
                                   Scalar beta);

MomentTable empirical_moments(const PathSample& paths,
                              const std::vector<Scalar>& ts);
MomentTable empirical_moments_of(const Mat& columns, const std::vector<Scalar>& ts);

// Independent quadrature reference for ||M_beta(t, .)||^2_{L2[t_min, t]}:
// closed form on [0,t], adaptive Simpson of the closed-form kernel on
// [t_min, 0].  Never touches the cell weights.
Scalar indicator_norm2_quadrature(Scalar beta, Scalar t, Scalar t_min);

}  // namespace flp
