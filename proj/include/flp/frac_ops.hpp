#pragma once

#include "flp/time_grid.hpp"
#include "flp/types.hpp"

namespace flp {

enum class Side { minus, plus };
enum class ConvMethod { automatic, direct, fft };

// Riemann-Liouville fractional integral of order beta in (0,1) of a
// piecewise-constant grid function, returned as cell averages.
//
//   minus: (I f)(t) = 1/Gamma(beta) int_t^inf (s-t)^{beta-1} f(s) ds
//   plus : (I f)(t) = 1/Gamma(beta) int_-inf^t (t-s)^{beta-1} f(s) ds
//
// Both the inner integral over each source cell and the outer cell average
// are done with the exact power-law antiderivative, so the whole operator is
// a Toeplitz convolution with weights
//
//   W_k = h^beta / Gamma(beta+2) * [ (k+1)^{beta+1} - 2 k^{beta+1}
//                                    + (k-1)_+^{beta+1} ],  k >= 0,
//
// and no quadrature ever touches the (.)^{beta-1} singularity.  Values
// outside the grid are zero (t_min stands in for -infinity).  The direct and
// FFT evaluations agree to ~1e-15 relative; `automatic` picks by size.
GridFunction rl_fractional_integral(const GridFunction& f, Scalar beta,
                                    Side side,
                                    ConvMethod method = ConvMethod::automatic);

// The Toeplitz weights above, k = 0..n-1.
Arr rl_cell_weights(Scalar beta, Scalar h, Index n);

// Pointwise (not cell-averaged) value of the fractional integral at time t;
// exact for piecewise-constant f.
Scalar rl_pointwise(const GridFunction& f, Scalar beta, Side side, Scalar t);

// Cell averages over s of the moving-average kernel
//
//   M_beta(t,s) = ( (t-s)_+^beta - (-s)_+^beta ) / Gamma(beta+1),
//
// i.e. of I^beta_- applied to the indicator of [0,t] (for t >= 0; the t < 0
// branch of the two-sided definition carries a minus sign and indicator of
// [t,0]).  Requires 0 to sit on a cell edge.  Summing weight * increment over
// cells is the Wiener-integral approximation of X^beta_t.
GridFunction indicator_kernel_weights(Scalar t, Scalar beta,
                                      const TimeGrid& grid);

// Closed-form bound on the kernel L2 mass lost below t_min:
//
//   int_-inf^{t_min} M_beta(t,s)^2 ds <= t^2 |t_min|^{2 beta - 1}
//                                        / ((1 - 2 beta) Gamma(beta)^2),
//
// valid for t_min < 0 < t (mean value theorem on the power difference).
struct TruncationReport {
  Scalar tail_bound = 0;       // bound on the lost L2 mass
  Scalar truncated_norm2 = 0;  // discrete ||M||^2 actually on the grid
  Scalar relative_deficit = 0; // tail_bound / (tail_bound + truncated_norm2)
  Scalar required_t_min = 0;   // t_min that would meet the budget
};
TruncationReport truncation_report(Scalar beta, Scalar t, const TimeGrid& grid,
                                   Scalar budget);

Scalar truncation_tail_bound(Scalar beta, Scalar t, Scalar t_min);

}  // namespace flp
