#include "flp/skorohod.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>

#include "flp/frac_ops.hpp"

namespace flp {

namespace {

struct MIHash {
  std::size_t operator()(const MultiIndex& a) const {
    return static_cast<std::size_t>(a.hash());
  }
};

void check_family_basis(const BasisPtr& basis, const ChaosElement& f) {
  if (f.basis() != basis)
    throw std::invalid_argument("family element on a different basis");
}

Arr default_cell_weights(const BasisPtr& basis, const Arr* cell_weights) {
  const Index n = basis->grid.n_cells();
  if (!cell_weights) return Arr::Constant(n, basis->grid.h());
  if (cell_weights->size() != n)
    throw std::invalid_argument("cell weight size does not match grid");
  return *cell_weights;
}

void check_time_family(const BasisPtr& basis, const TimeFamily& family) {
  if (!basis) throw std::invalid_argument("null basis");
  if (static_cast<Index>(family.size()) != basis->grid.n_cells())
    throw std::invalid_argument("time family size does not match grid");
  for (const ChaosElement& f : family) check_family_basis(basis, f);
}

}  // namespace

ChaosElement skorohod_pjm(const BasisPtr& basis,
                          const std::vector<ChaosElement>& family) {
  if (!basis) throw std::invalid_argument("null basis");
  if (static_cast<Index>(family.size()) != basis->n_basis())
    throw std::invalid_argument("basis family size does not match basis");
  const int cap = basis->chaos_order;

  std::unordered_map<MultiIndex, Scalar, MIHash> acc;
  bool dropped = false;
  bool overflow_in = false;
  for (Index k = 0; k < basis->n_basis(); ++k) {
    check_family_basis(basis, family[static_cast<std::size_t>(k)]);
    overflow_in =
        overflow_in || family[static_cast<std::size_t>(k)].overflow();
    const Scalar root_w = std::sqrt(basis->pi_weight(k));
    for (const auto& [a, c] : family[static_cast<std::size_t>(k)].terms()) {
      if (a.order() + 1 > cap) {
        dropped = true;
        continue;
      }
      acc[a.plus(k)] += c * root_w;
    }
  }
  ChaosElement out(basis);
  std::vector<ChaosElement::Term> terms(acc.begin(), acc.end());
  out.set_terms(std::move(terms));
  out.set_overflow(overflow_in || dropped);
  return out;
}

ChaosElement skorohod_frac(Scalar beta, const TimeFamily& family,
                           const BasisPtr& basis, const Arr* cell_weights) {
  check_time_family(basis, family);
  const TimeGrid& grid = basis->grid;
  const Arr omega = default_cell_weights(basis, cell_weights);
  const Index n = grid.n_cells();
  const Arr w = rl_cell_weights(beta, grid.h(), n);
  const int cap = basis->chaos_order;

  std::unordered_map<MultiIndex, Scalar, MIHash> acc;
  bool dropped = false;
  bool overflow_in = false;
  for (Index i = 0; i < n; ++i) {
    if (omega[i] == 0.0) continue;
    const ChaosElement& f = family[static_cast<std::size_t>(i)];
    overflow_in = overflow_in || f.overflow();
    if (f.terms().empty()) continue;
    const Scalar scale = omega[i];
    // Noise cell average pairs cell i with every earlier-or-equal cell i'.
    for (Index k = 0; k < basis->n_basis(); ++k) {
      const Index ip = basis->time_cell(k);
      if (ip > i) continue;
      const Scalar c_noise = basis->mark_value(k) * (w[i - ip] / grid.h()) *
                             std::sqrt(basis->pi_weight(k));
      if (c_noise == 0.0) continue;
      for (const auto& [a, c] : f.terms()) {
        if (a.order() + 1 > cap) {
          dropped = true;
          continue;
        }
        acc[a.plus(k)] += scale * c * c_noise;
      }
    }
  }
  ChaosElement out(basis);
  std::vector<ChaosElement::Term> terms(acc.begin(), acc.end());
  out.set_terms(std::move(terms));
  out.set_overflow(overflow_in || dropped);
  return out;
}

namespace {

// Gathers the distinct chaos keys of a time family and applies a scalar
// time-series transform to each key's coefficient series.
TimeFamily transform_series(const BasisPtr& basis, const TimeFamily& family,
                            const Arr& scale,
                            const std::function<Arr(const Arr&)>& apply) {
  const Index n = basis->grid.n_cells();
  std::unordered_map<MultiIndex, Arr, MIHash> series;
  bool overflow_in = false;
  for (Index i = 0; i < n; ++i) {
    const ChaosElement& f = family[static_cast<std::size_t>(i)];
    overflow_in = overflow_in || f.overflow();
    for (const auto& [a, c] : f.terms()) {
      auto it = series.find(a);
      if (it == series.end()) it = series.emplace(a, Arr::Zero(n)).first;
      it->second[i] = c * scale[i];
    }
  }
  std::vector<std::pair<MultiIndex, Arr>> out_series;
  out_series.reserve(series.size());
  for (auto& [a, s] : series) out_series.emplace_back(a, apply(s));

  TimeFamily out(static_cast<std::size_t>(n), ChaosElement(basis));
  for (Index i = 0; i < n; ++i) {
    std::vector<ChaosElement::Term> terms;
    for (const auto& [a, s] : out_series)
      if (s[i] != 0.0) terms.push_back({a, s[i]});
    out[static_cast<std::size_t>(i)].set_terms(std::move(terms));
    out[static_cast<std::size_t>(i)].set_overflow(overflow_in);
  }
  return out;
}

}  // namespace

std::vector<ChaosElement> frac_kernel_family(Scalar beta,
                                             const TimeFamily& family,
                                             const BasisPtr& basis,
                                             const Arr* cell_weights) {
  check_time_family(basis, family);
  const TimeGrid& grid = basis->grid;
  const Arr omega = default_cell_weights(basis, cell_weights);
  const Arr scale = omega / grid.h();

  const TimeFamily integrated =
      transform_series(basis, family, scale, [&](const Arr& s) {
        const GridFunction g{grid, s};
        return rl_fractional_integral(g, beta, Side::minus).values;
      });

  std::vector<ChaosElement> out;
  out.reserve(static_cast<std::size_t>(basis->n_basis()));
  for (Index k = 0; k < basis->n_basis(); ++k) {
    ChaosElement e =
        integrated[static_cast<std::size_t>(basis->time_cell(k))];
    e *= basis->mark_value(k);
    out.push_back(std::move(e));
  }
  return out;
}

TimeFamily fractional_transform_integrand(const TimeFamily& family,
                                          Scalar alpha, Scalar beta,
                                          const BasisPtr& basis) {
  if (!(alpha > 0.0) || !(alpha < beta) || !(beta < 0.5))
    throw std::invalid_argument(
        "transform orders must satisfy 0 < alpha < beta < 1/2");
  check_time_family(basis, family);
  const Arr ones = Arr::Ones(basis->grid.n_cells());
  const Scalar gamma = beta - alpha;
  return transform_series(basis, family, ones, [&](const Arr& s) {
    const GridFunction g{basis->grid, s};
    return rl_fractional_integral(g, gamma, Side::minus).values;
  });
}

ChaosElement wiener_integral_element(const GridFunction& g, Scalar beta,
                                     const BasisPtr& basis) {
  if (!basis) throw std::invalid_argument("null basis");
  if (!(g.grid == basis->grid))
    throw std::invalid_argument("grid function on a different grid");
  const Arr kernel = rl_fractional_integral(g, beta, Side::minus).values;
  Arr values(basis->n_basis());
  for (Index k = 0; k < basis->n_basis(); ++k)
    values[k] = basis->mark_value(k) * kernel[basis->time_cell(k)];
  return first_chaos_from_values(basis, values);
}

Arr wiener_integral_pathwise(const GridFunction& g, Scalar beta,
                             const IncrementSample& increments) {
  if (!(g.grid == increments.grid))
    throw std::invalid_argument("grid function on a different grid");
  const Arr kernel = rl_fractional_integral(g, beta, Side::minus).values;
  return (increments.increments * kernel.matrix()).array();
}

TimeFamily deterministic_family(const BasisPtr& basis, const GridFunction& g) {
  if (!basis) throw std::invalid_argument("null basis");
  if (!(g.grid == basis->grid))
    throw std::invalid_argument("grid function on a different grid");
  TimeFamily out;
  out.reserve(static_cast<std::size_t>(g.values.size()));
  for (Index i = 0; i < g.values.size(); ++i)
    out.push_back(chaos_constant(basis, g.values[i]));
  return out;
}

}  // namespace flp
