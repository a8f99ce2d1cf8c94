#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "flp/levy_models.hpp"
#include "flp/time_grid.hpp"
#include "flp/types.hpp"

namespace flp {

// ---------------------------------------------------------------------------
// Finite chaos expansion over a product grid on U = R x R_0.
//
// Basis cells are (time cell i) x (mark atom j), flattened to k = i*m + j,
// with pi-weight w_k = h * w_j and orthonormal indicator e_k = 1_cell/sqrt(w_k).
// A chaos element is a sparse map {multi-index alpha -> coefficient} truncated
// at total order N.  Coefficients are normalized so that
//
//   S(K_alpha)(eta) = prod_k eta_k^{alpha_k},   eta_k = <e_k, eta>_pi,
//
// which makes the Wick product a plain Cauchy product of coefficient maps and
// the S-transform a homomorphism by construction; the usual factorial
// bookkeeping lives in this normalization once and for all.  A first-chaos
// element with kernel f has coefficients c_{e_k} = <f, e_k>_pi.
// ---------------------------------------------------------------------------

// Sorted multiset of basis ids, at most max_order entries (16-bit ids).
class MultiIndex {
 public:
  static constexpr int max_order = 12;

  MultiIndex() = default;

  int order() const { return n_; }
  bool empty() const { return n_ == 0; }
  std::uint16_t slot(int i) const { return slot_[static_cast<std::size_t>(i)]; }

  static MultiIndex single(Index k);
  MultiIndex plus(Index k) const;                       // alpha + e_k
  static MultiIndex merged(const MultiIndex& a, const MultiIndex& b);

  // (basis id, multiplicity) runs, ascending ids.
  template <class Fn>
  void for_each_run(Fn&& fn) const {
    int i = 0;
    while (i < n_) {
      int j = i;
      while (j < n_ && slot_[static_cast<std::size_t>(j)] ==
                           slot_[static_cast<std::size_t>(i)])
        ++j;
      fn(static_cast<Index>(slot_[static_cast<std::size_t>(i)]), j - i);
      i = j;
    }
  }

  bool operator==(const MultiIndex& o) const {
    if (n_ != o.n_) return false;
    for (int i = 0; i < n_; ++i)
      if (slot_[static_cast<std::size_t>(i)] != o.slot_[static_cast<std::size_t>(i)])
        return false;
    return true;
  }
  // Orders first by total degree, then lexicographically: dumps group by level.
  bool operator<(const MultiIndex& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    for (int i = 0; i < n_; ++i) {
      const auto a = slot_[static_cast<std::size_t>(i)];
      const auto b = o.slot_[static_cast<std::size_t>(i)];
      if (a != b) return a < b;
    }
    return false;
  }

  std::uint64_t hash() const;

 private:
  std::uint8_t n_ = 0;
  std::array<std::uint16_t, max_order> slot_{};
};

struct BasisSpec {
  TimeGrid grid;
  DiscretizedMeasure marks;
  int chaos_order;  // truncation cap N

  Index n_marks() const { return marks.size(); }
  Index n_basis() const { return grid.n_cells() * marks.size(); }
  Index time_cell(Index k) const { return k / marks.size(); }
  Index mark_index(Index k) const { return k % marks.size(); }
  Scalar mark_value(Index k) const {
    return marks.marks[static_cast<std::size_t>(mark_index(k))];
  }
  Scalar pi_weight(Index k) const {
    return grid.h() * marks.weights[static_cast<std::size_t>(mark_index(k))];
  }
};

using BasisPtr = std::shared_ptr<const BasisSpec>;

BasisPtr make_basis(const TimeGrid& grid, const DiscretizedMeasure& marks,
                    int chaos_order);

class ChaosElement {
 public:
  using Term = std::pair<MultiIndex, Scalar>;

  ChaosElement() = default;
  explicit ChaosElement(BasisPtr basis) : basis_(std::move(basis)) {}

  const BasisPtr& basis() const { return basis_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool overflow() const { return overflow_; }
  void set_overflow(bool v) { overflow_ = v; }

  Scalar coefficient(const MultiIndex& a) const;
  Scalar constant_part() const { return coefficient(MultiIndex()); }
  int max_order() const;
  Scalar coeff_l2_norm() const;  // plain l2 of the coefficient vector

  // Terms must be unique-keyed; they get sorted and zeros dropped.
  void set_terms(std::vector<Term> terms);
  void add_term(const MultiIndex& a, Scalar c);  // accumulate one coefficient

  ChaosElement& operator*=(Scalar s);
  ChaosElement& operator+=(const ChaosElement& o);

 private:
  BasisPtr basis_;
  std::vector<Term> terms_;  // sorted by MultiIndex, no duplicate keys
  bool overflow_ = false;

  friend ChaosElement wick_product(const ChaosElement&, const ChaosElement&);
};

ChaosElement chaos_constant(const BasisPtr& basis, Scalar c);
// coeffs[k] = <f, e_k>_pi
ChaosElement first_chaos(const BasisPtr& basis, const Arr& coeffs);
// values[k] = the cell value of the kernel on basis cell k (multiplied by
// sqrt(pi-weight) internally)
ChaosElement first_chaos_from_values(const BasisPtr& basis, const Arr& values);

ChaosElement operator+(ChaosElement a, const ChaosElement& b);
ChaosElement operator-(ChaosElement a, const ChaosElement& b);
ChaosElement operator*(ChaosElement a, Scalar s);
ChaosElement operator*(Scalar s, ChaosElement a);

// Cauchy product of coefficient maps, truncated at the basis order cap;
// the sticky overflow flag records any dropped nonzero mass.
ChaosElement wick_product(const ChaosElement& f, const ChaosElement& g);

// sum_{n=0..N} F^{wick n} / n!, early-terminated once a power contributes
// less than ~1e-16 of the running coefficient norm.  |constant part| <= 20.
ChaosElement wick_exp(const ChaosElement& f);

// Test function eta given through its orthonormal coefficients eta_k; the
// admissibility gauge is the plain l2 norm, and S-transform evaluation
// requires gauge < 1.
struct TestFunction {
  BasisPtr basis;
  Arr coeffs;

  Scalar gauge() const { return std::sqrt(coeffs.square().sum()); }
};

TestFunction test_function_from_values(const BasisPtr& basis, const Arr& values);
std::vector<TestFunction> random_probes(const BasisPtr& basis, Index count,
                                        std::uint64_t seed,
                                        Scalar target_gauge = 0.5);

Scalar s_transform(const ChaosElement& f, const TestFunction& eta);

// First-chaos element of the noise at time t:
//   kernel (u,y) -> y (t-u)_+^{beta-1} / Gamma(beta),
// with the singular time factor integrated exactly over each cell.
ChaosElement noise_element(Scalar beta, Scalar t, const BasisPtr& basis);

// Same kernel additionally averaged exactly over time cell i (both the t- and
// u-integrals done with power-law antiderivatives); this is the noise factor
// a cell-resolved Riemann sum in t should carry.
ChaosElement noise_element_time_avg(Scalar beta, Index time_cell,
                                    const BasisPtr& basis);

// First-chaos element of X^beta_t itself (indicator kernel cell averages).
ChaosElement indicator_chaos_element(Scalar beta, Scalar t, const BasisPtr& basis);

enum class NormMode { grid_proxy, hermite_first_chaos };

struct HermiteNormDetail {
  Scalar value = 0;
  Scalar tail_fraction = 0;  // share contributed by the top eighth of n
};

// Weighted-l2 decay proxy: each slot k of a multi-index contributes a factor
// (1 + rank(k))^{-2p} with rank(k) = k+1 in the flattened (time, mark)
// ordering.  Monitoring/gauge use only; no correctness claim rides on it.
Scalar grid_proxy_norm(const ChaosElement& f, Scalar p);

// Negative-order Hermite norm of a pure first-chaos element with separable
// kernel y * k(u):  m2 * sum_{n<=n_max} (n+1)^{-2p} <k, xi_n>^2_{L2(R)}.
HermiteNormDetail hermite_first_chaos_norm(const ChaosElement& f, Scalar p,
                                           Index n_max = 256);

Scalar distribution_norm(const ChaosElement& f, Scalar p, NormMode mode);

// Sparse text round-trip: one term per line, "k:count ... -> coefficient",
// "-" for the empty multi-index, %.17g values, LF line endings.
std::string to_sparse_text(const ChaosElement& f);
ChaosElement from_sparse_text(const BasisPtr& basis, const std::string& text);

}  // namespace flp
