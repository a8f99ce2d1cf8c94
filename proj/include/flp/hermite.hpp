#pragma once

#include "flp/types.hpp"

namespace flp {

// Orthonormal Hermite functions xi_0..xi_n_max evaluated at the given points
// (column n holds xi_n).  Stable three-term recurrence:
//   xi_{n+1}(x) = sqrt(2/(n+1)) x xi_n(x) - sqrt(n/(n+1)) xi_{n-1}(x),
//   xi_0(x) = pi^{-1/4} exp(-x^2/2).
Mat hermite_functions(const Arr& x, Index n_max);

// c_n = int_{-inf}^t (t-u)^{beta-1} xi_n(u) du for n = 0..n_max.
//
// The integrable singularity at u = t is handled by the substitution
// v = (t-u)^beta (the integrand becomes xi_n(t - v^{1/beta})/beta, smooth);
// the oscillatory remainder uses composite Gauss-Legendre with panels shorter
// than half an oscillation of xi_{n_max}.  Quadrature error is far below the
// cancellation floor of any downstream difference of two such vectors.
Arr power_kernel_hermite_coeffs(Scalar beta, Scalar t, Index n_max);

}  // namespace flp
