#pragma once

#include <utility>
#include <vector>

#include "flp/chaos.hpp"
#include "flp/types.hpp"

namespace flp {

// Wick-affine SDE on [0, T]:
//
//   U(t) = U0 + ∫_0^t b(U(s)) ds + ∫_0^t σ(U(s)) ◇ Ẋ^β_s ds
//
// with affine coefficients F(U) = c0 + c1 ◇ U.  Discretization matches the
// Volterra solver: solution values at cell centers of the non-negative
// cells, integrals by the trapezoid-on-centers rule (h per interior cell,
// h/2 at the endpoint cell), noise by its exact cell average.

struct WickAffineCoefficient {
  ChaosElement c0;  // constant part
  ChaosElement c1;  // Wick multiplier
};

struct SdeProblem {
  BasisPtr basis;  // grid spans [t_min, T]; solution cells have center > 0
  Scalar beta = 0.25;
  ChaosElement u0;
  WickAffineCoefficient b;
  WickAffineCoefficient sigma;
  Scalar gauge_p = 2.0;  // weighted-norm exponent for validation and stops

  Index first_solve_cell() const;
  Index n_solve() const;
  Scalar solve_time(Index i) const;
};

// Effective Lipschitz/growth constants of the affine right-hand side in the
// weighted coefficient norm with exponent gauge_p, computed on the truncated
// chaos space exactly as the solver applies the coefficients.
struct CoefficientReport {
  Scalar lipschitz_b = 0;      // operator norm of Y -> b.c1 ◇ Y
  Scalar lipschitz_sigma = 0;  // operator norm of Y -> sigma.c1 ◇ Y
  Scalar noise_gauge_max = 0;  // sup over solve cells of the noise gauge
  Scalar c_eff = 0;            // operator norm of the full map at the
                               // dominant noise cell
  Scalar growth_bound = 0;     // constant-part gauge + c_eff
  Index noise_argmax = -1;     // solve cell with the largest noise gauge
};

CoefficientReport validate_coefficients(const SdeProblem& p, Scalar gauge_p);

struct SdeSolution {
  std::vector<ChaosElement> u;  // one element per solve cell
  Arr update_norms;             // sup-in-t weighted norm per iteration
  Arr decay_ratios;             // successive update-norm ratios
  Index iterations = 0;
  bool converged = false;
  bool overflow = false;
  bool certified = false;
  Scalar c_eff = 0;
};

// Picard iteration from initial_guess (default: U(t) = U0).  Throws when the
// step guard h * c_eff >= 0.5 fails or max_iter is exhausted above tol.
SdeSolution picard_solve(const SdeProblem& p, Scalar tol, Index max_iter,
                         const ChaosElement* initial_guess = nullptr);

// First-chaos element of ∫_0^{t_i} Ẋ^β_s ds under the solver's quadrature
// (i_solve indexes solution cells); the discrete process the solver sees.
ChaosElement noise_prefix_integral(Scalar beta, const BasisPtr& basis,
                                   Index i_solve);

// Squared weighted-norm distance of the noise at two times, up to the mark
// measure's second-moment factor, via Hermite coefficients of the kernel.
Scalar noise_difference_norm2(Scalar beta, Scalar p, Scalar t, Scalar s,
                              Index n_max = 256);

struct HolderReport {
  Scalar slope = 0;      // d log ||Ẋ_t - Ẋ_s||^2 / d log |t - s|
  Scalar intercept = 0;
  Scalar max_residual = 0;
  Arr log_gap;
  Arr log_norm2;
};

HolderReport holder_noise_check(Scalar beta, Scalar gauge_p,
                                const std::vector<std::pair<Scalar, Scalar>>& t_pairs,
                                Index n_max = 256);

}  // namespace flp
