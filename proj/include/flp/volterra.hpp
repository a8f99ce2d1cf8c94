#pragma once

#include <vector>

#include "flp/chaos.hpp"
#include "flp/skorohod.hpp"
#include "flp/types.hpp"

namespace flp {

// Linear Wick-Volterra equation on [0, T]:
//
//   U(t) = J(t) + ∫_0^t b(t,s) U(s) ds + ∫_0^t σ(t,s) ◇ U(s) δX^β_s
//
// discretized at cell centers of the basis grid's non-negative cells.  Both
// integrals collapse into one triangular operator A with combined kernel
// K(t,s) = b(t,s) + σ(t,s) ◇ Ẋ̄_s (Ẋ̄_s = cell average of the fractional
// noise, which integrates the kernel singularity exactly).  The quadrature
// from 0 to t_i weights interior cells by h and the endpoint cell by h/2
// (trapezoid on cell centers).  Because the weights depend only on the row,
// A is a plain matrix over the commutative Wick algebra: its powers commute,
// so the resolvent series B = Σ Aⁿ satisfies B = A + A·B to rounding and the
// three backends solve the same discrete system.

// Deterministic kernel presets on the triangle s <= t.
struct KernelPreset {
  enum class Kind { constant, exponential, polynomial };
  Kind kind = Kind::constant;
  Scalar amplitude = 0.0;  // overall factor
  Scalar rate = 0.0;       // exponential: a * exp(-rate * (t - s))
  int degree = 0;          // polynomial: a * (t - s)^degree

  Scalar operator()(Scalar t, Scalar s) const;
};

KernelPreset constant_kernel(Scalar a);
KernelPreset exponential_kernel(Scalar a, Scalar rate);
KernelPreset polynomial_kernel(Scalar a, int degree);

struct VolterraProblem {
  BasisPtr basis;  // grid spans [t_min, T]; solution cells have center > 0
  Scalar beta = 0.25;
  std::vector<ChaosElement> forcing;  // J, one element per solution cell
  KernelPreset b;
  KernelPreset sigma;
  Scalar gauge_p = 2.0;      // exponent of the kernel gauge monitor
  Scalar gauge_limit = 0.0;  // 0 disables the monitor

  Index first_solve_cell() const;  // global index of the cell starting at 0
  Index n_solve() const;
  Scalar solve_time(Index i) const;  // center of solution cell i
};

enum class VolterraBackend { chaos_picard, chaos_resolvent, s_collocation };

struct VolterraSolution {
  std::vector<ChaosElement> u;  // chaos backends: one element per solve cell
  Mat collocation;              // s_collocation: n_solve x n_probes values
  Arr update_norms;  // per-iteration update norm / per-order term norm
  Index iterations = 0;
  bool converged = false;
  bool diverged = false;
  bool overflow = false;
  bool certified = false;  // converged, no overflow, gauge respected
  Scalar kernel_gauge_max = 0.0;
  bool gauge_ok = true;
};

VolterraSolution solve_volterra(const VolterraProblem& p,
                                VolterraBackend backend, Scalar tol,
                                Index max_iter,
                                const std::vector<TestFunction>& probes = {});

// Resolvent kernel H(t,s) = Σ_{n<=n_max} K_n(t,s) with K_1 = K and
// K_{n+1} the trapezoid composition of K_n with K.  Chaos entries are
// materialized on the triangle, so the grid is capped at 64 solution cells.
struct ResolventResult {
  std::vector<std::vector<ChaosElement>> H;  // H[i] holds m = 0..i
  Arr term_norms;                            // Frobenius norm per order
  Index n_used = 0;
  bool diverged = false;
  bool overflow = false;
};

ResolventResult resolvent_kernel(const VolterraProblem& p, Index n_max,
                                 Scalar tol = 0.0);

// Deterministic fast path (sigma == 0, deterministic forcing not required):
// one column H(., s_m) of the resolvent kernel, via repeated operator
// application; usable at h = 1e-3 scale.
Arr resolvent_column(const VolterraProblem& p, Index m_solve, Index n_max);

}  // namespace flp
