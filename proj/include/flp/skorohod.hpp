#pragma once

#include <vector>

#include "flp/chaos.hpp"
#include "flp/levy_models.hpp"
#include "flp/types.hpp"

namespace flp {

// Skorohod integrals over the finite chaos algebra.
//
// Two integrator conventions share one code path:
//  * skorohod_pjm:  the integrand is a family G(k) indexed by the space-time
//    basis; delta(G) shifts every chaos term of G(k) by one occupation of
//    slot k, scaled by sqrt(pi_weight(k)).  A deterministic family lands in
//    the first chaos.
//  * skorohod_frac: the integrand is a time-indexed family F(i) (one element
//    per grid cell, constant on the cell); the integral pairs F(i) with the
//    cell average of the fractional noise, so that the two evaluation orders
//    "integrate the kernel first" and "pair with the noise first" agree to
//    rounding.  A per-cell weight vector selects the time window (plain
//    cell measure, a sub-interval mask, or a solver's quadrature rule).

// One chaos element per grid cell, representing a piecewise-constant-in-time
// random integrand.
using TimeFamily = std::vector<ChaosElement>;

// delta(G): G must hold one element per basis slot.  Sticky overflow is set
// when a shifted term would exceed the basis order cap.
ChaosElement skorohod_pjm(const BasisPtr& basis,
                          const std::vector<ChaosElement>& family);

// Fractional Skorohod integral of a time family.  cell_weights defaults to
// the plain cell measure (h per cell); pass zeros to mask cells out.
ChaosElement skorohod_frac(Scalar beta, const TimeFamily& family,
                           const BasisPtr& basis,
                           const Arr* cell_weights = nullptr);

// The kernel-first route: basis-indexed family whose slot (i', j) holds the
// mark value times the cell average of the order-beta right fractional
// integral of the weighted time family.  skorohod_pjm of this equals
// skorohod_frac of the input up to rounding.
std::vector<ChaosElement> frac_kernel_family(Scalar beta,
                                             const TimeFamily& family,
                                             const BasisPtr& basis,
                                             const Arr* cell_weights = nullptr);

// Right fractional integral of order beta - alpha applied to the family,
// coefficient-wise in time.  Requires 0 < alpha < beta < 1/2.
TimeFamily fractional_transform_integrand(const TimeFamily& family,
                                          Scalar alpha, Scalar beta,
                                          const BasisPtr& basis);

// First-chaos element of the Wiener integral of a deterministic grid
// function: slot (i, j) holds y_j times the cell average of the order-beta
// right fractional integral of g.
ChaosElement wiener_integral_element(const GridFunction& g, Scalar beta,
                                     const BasisPtr& basis);

// Pathwise Wiener integral: per-path sum of the fractionally integrated
// deterministic integrand against the increments.  Returns one value per
// path.
Arr wiener_integral_pathwise(const GridFunction& g, Scalar beta,
                             const IncrementSample& increments);

// Wraps a deterministic grid function as a time family of constants.
TimeFamily deterministic_family(const BasisPtr& basis, const GridFunction& g);

}  // namespace flp
