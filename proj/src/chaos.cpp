#include "flp/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "flp/frac_ops.hpp"
#include "flp/hermite.hpp"
#include "flp/rng.hpp"

namespace flp {

// ---------------------------------------------------------------- MultiIndex

MultiIndex MultiIndex::single(Index k) {
  MultiIndex a;
  a.n_ = 1;
  a.slot_[0] = static_cast<std::uint16_t>(k);
  return a;
}

MultiIndex MultiIndex::plus(Index k) const {
  if (n_ >= max_order)
    throw std::length_error("multi-index order cap exceeded");
  MultiIndex a = *this;
  const auto v = static_cast<std::uint16_t>(k);
  int i = a.n_;
  while (i > 0 && a.slot_[static_cast<std::size_t>(i - 1)] > v) {
    a.slot_[static_cast<std::size_t>(i)] = a.slot_[static_cast<std::size_t>(i - 1)];
    --i;
  }
  a.slot_[static_cast<std::size_t>(i)] = v;
  ++a.n_;
  return a;
}

MultiIndex MultiIndex::merged(const MultiIndex& a, const MultiIndex& b) {
  if (a.n_ + b.n_ > max_order)
    throw std::length_error("multi-index order cap exceeded");
  MultiIndex out;
  out.n_ = static_cast<std::uint8_t>(a.n_ + b.n_);
  std::merge(a.slot_.begin(), a.slot_.begin() + a.n_, b.slot_.begin(),
             b.slot_.begin() + b.n_, out.slot_.begin());
  return out;
}

std::uint64_t MultiIndex::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull ^ n_;
  for (int i = 0; i < n_; ++i) {
    h ^= slot_[static_cast<std::size_t>(i)] + 1ull;
    h *= 0x100000001b3ull;
    h ^= h >> 29;
  }
  return h * 0x9e3779b97f4a7c15ull;
}

namespace {

struct MIHash {
  std::size_t operator()(const MultiIndex& a) const {
    return static_cast<std::size_t>(a.hash());
  }
};

void require_same_basis(const BasisPtr& a, const BasisPtr& b) {
  if (a == b) return;
  if (!a || !b) throw std::invalid_argument("element without basis");
  const bool same = a->grid == b->grid && a->chaos_order == b->chaos_order &&
                    a->marks.marks == b->marks.marks &&
                    a->marks.weights == b->marks.weights;
  if (!same)
    throw std::invalid_argument("mixing chaos elements from different bases");
}

}  // namespace

// --------------------------------------------------------------- BasisSpec

BasisPtr make_basis(const TimeGrid& grid, const DiscretizedMeasure& marks,
                    int chaos_order) {
  if (chaos_order < 0 || chaos_order > MultiIndex::max_order)
    throw std::invalid_argument("chaos order must lie in [0, 12]");
  if (marks.size() < 1) throw std::invalid_argument("basis needs marks");
  for (Index j = 0; j < marks.size(); ++j) {
    if (!(marks.weights[static_cast<std::size_t>(j)] > 0))
      throw std::invalid_argument("mark weights must be > 0");
    if (marks.marks[static_cast<std::size_t>(j)] == 0)
      throw std::invalid_argument("marks must be nonzero");
  }
  if (grid.n_cells() * marks.size() > 65535)
    throw std::invalid_argument("basis too large for 16-bit cell ids");
  return std::make_shared<BasisSpec>(BasisSpec{grid, marks, chaos_order});
}

// ------------------------------------------------------------- ChaosElement

Scalar ChaosElement::coefficient(const MultiIndex& a) const {
  const auto it = std::lower_bound(
      terms_.begin(), terms_.end(), a,
      [](const Term& t, const MultiIndex& key) { return t.first < key; });
  return (it != terms_.end() && it->first == a) ? it->second : 0.0;
}

int ChaosElement::max_order() const {
  int m = 0;
  for (const Term& t : terms_) m = std::max(m, t.first.order());
  return m;
}

Scalar ChaosElement::coeff_l2_norm() const {
  Scalar s = 0;
  for (const Term& t : terms_) s += t.second * t.second;
  return std::sqrt(s);
}

void ChaosElement::set_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  std::vector<Term> folded;
  folded.reserve(terms.size());
  for (const Term& t : terms) {
    if (!folded.empty() && folded.back().first == t.first)
      folded.back().second += t.second;
    else
      folded.push_back(t);
  }
  folded.erase(std::remove_if(folded.begin(), folded.end(),
                              [](const Term& t) { return t.second == 0.0; }),
               folded.end());
  terms_ = std::move(folded);
}

void ChaosElement::add_term(const MultiIndex& a, Scalar c) {
  if (c == 0.0) return;
  const auto it = std::lower_bound(
      terms_.begin(), terms_.end(), a,
      [](const Term& t, const MultiIndex& key) { return t.first < key; });
  if (it != terms_.end() && it->first == a)
    it->second += c;
  else
    terms_.insert(it, Term{a, c});
}

ChaosElement& ChaosElement::operator*=(Scalar s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (Term& t : terms_) t.second *= s;
  return *this;
}

ChaosElement& ChaosElement::operator+=(const ChaosElement& o) {
  // A default-constructed element is the zero of every basis: adding it is a
  // no-op, and adding onto it adopts the other side's basis.
  if (!o.basis_ && o.terms_.empty()) {
    overflow_ = overflow_ || o.overflow_;
    return *this;
  }
  if (!basis_ && terms_.empty()) {
    const bool had_overflow = overflow_;
    *this = o;
    overflow_ = overflow_ || had_overflow;
    return *this;
  }
  require_same_basis(basis_, o.basis_);
  std::vector<Term> merged;
  merged.reserve(terms_.size() + o.terms_.size());
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  while (a != terms_.end() || b != o.terms_.end()) {
    if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == terms_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      const Scalar c = a->second + b->second;
      if (c != 0.0) merged.push_back(Term{a->first, c});
      ++a;
      ++b;
    }
  }
  terms_ = std::move(merged);
  overflow_ = overflow_ || o.overflow_;
  return *this;
}

ChaosElement chaos_constant(const BasisPtr& basis, Scalar c) {
  if (!basis) throw std::invalid_argument("null basis");
  ChaosElement f(basis);
  if (c != 0.0) f.set_terms({{MultiIndex(), c}});
  return f;
}

ChaosElement first_chaos(const BasisPtr& basis, const Arr& coeffs) {
  if (!basis) throw std::invalid_argument("null basis");
  if (coeffs.size() != basis->n_basis())
    throw std::invalid_argument("first-chaos coefficient size mismatch");
  if (basis->chaos_order < 1)
    throw std::invalid_argument("basis order cap below 1");
  ChaosElement f(basis);
  std::vector<ChaosElement::Term> terms;
  for (Index k = 0; k < coeffs.size(); ++k)
    if (coeffs[k] != 0.0) terms.push_back({MultiIndex::single(k), coeffs[k]});
  f.set_terms(std::move(terms));
  return f;
}

ChaosElement first_chaos_from_values(const BasisPtr& basis, const Arr& values) {
  if (!basis) throw std::invalid_argument("null basis");
  if (values.size() != basis->n_basis())
    throw std::invalid_argument("first-chaos value size mismatch");
  Arr coeffs(values.size());
  for (Index k = 0; k < values.size(); ++k)
    coeffs[k] = values[k] * std::sqrt(basis->pi_weight(k));
  return first_chaos(basis, coeffs);
}

ChaosElement operator+(ChaosElement a, const ChaosElement& b) {
  a += b;
  return a;
}
ChaosElement operator-(ChaosElement a, const ChaosElement& b) {
  ChaosElement nb = b;
  nb *= -1.0;
  a += nb;
  return a;
}
ChaosElement operator*(ChaosElement a, Scalar s) {
  a *= s;
  return a;
}
ChaosElement operator*(Scalar s, ChaosElement a) {
  a *= s;
  return a;
}

ChaosElement wick_product(const ChaosElement& f, const ChaosElement& g) {
  // The basis-free zero annihilates any factor.
  if ((!f.basis() && f.terms().empty()) || (!g.basis() && g.terms().empty())) {
    ChaosElement out(f.basis() ? f.basis() : g.basis());
    out.set_overflow(f.overflow() || g.overflow());
    return out;
  }
  require_same_basis(f.basis(), g.basis());
  const int cap = f.basis()->chaos_order;

  ChaosElement out(f.basis());
  bool dropped = false;
  std::unordered_map<MultiIndex, Scalar, MIHash> acc;
  acc.reserve(f.terms().size() * 2 + 8);
  const auto& gt = g.terms();
  for (const auto& [ia, ca] : f.terms()) {
    // Terms are sorted by order first, so the cap prunes a suffix of g.
    const int room = cap - ia.order();
    const auto cut = std::upper_bound(
        gt.begin(), gt.end(), room,
        [](int r, const ChaosElement::Term& t) { return r < t.first.order(); });
    if (cut != gt.end() && ca != 0.0) dropped = true;
    for (auto it = gt.begin(); it != cut; ++it)
      acc[MultiIndex::merged(ia, it->first)] += ca * it->second;
  }
  std::vector<ChaosElement::Term> terms(acc.begin(), acc.end());
  out.set_terms(std::move(terms));
  out.set_overflow(f.overflow() || g.overflow() || dropped);
  return out;
}

ChaosElement wick_exp(const ChaosElement& f) {
  if (!f.basis()) throw std::invalid_argument("element without basis");
  if (std::fabs(f.constant_part()) > 20.0)
    throw std::invalid_argument("wick_exp constant part out of range (|c| <= 20)");

  const int cap = f.basis()->chaos_order;
  ChaosElement acc = chaos_constant(f.basis(), 1.0);
  ChaosElement pow = acc;
  bool dropped = false;
  for (int n = 1; n <= cap; ++n) {
    pow = wick_product(pow, f);
    pow *= 1.0 / static_cast<Scalar>(n);
    dropped = dropped || pow.overflow();
    if (pow.terms().empty()) break;
    acc += pow;
    if (pow.coeff_l2_norm() < 1e-16 * (1.0 + acc.coeff_l2_norm())) break;
  }
  acc.set_overflow(f.overflow() || dropped);
  return acc;
}

// ------------------------------------------------------------ TestFunction

TestFunction test_function_from_values(const BasisPtr& basis, const Arr& values) {
  if (!basis) throw std::invalid_argument("null basis");
  if (values.size() != basis->n_basis())
    throw std::invalid_argument("test function value size mismatch");
  Arr coeffs(values.size());
  for (Index k = 0; k < values.size(); ++k)
    coeffs[k] = values[k] * std::sqrt(basis->pi_weight(k));
  return TestFunction{basis, std::move(coeffs)};
}

std::vector<TestFunction> random_probes(const BasisPtr& basis, Index count,
                                        std::uint64_t seed, Scalar target_gauge) {
  if (!basis) throw std::invalid_argument("null basis");
  if (!(target_gauge > 0) || !(target_gauge < 1))
    throw std::invalid_argument("probe gauge must lie in (0,1)");
  std::vector<TestFunction> probes;
  probes.reserve(static_cast<std::size_t>(count));
  for (Index q = 0; q < count; ++q) {
    SplitMix64 g = SplitMix64::stream(seed, static_cast<std::uint64_t>(q));
    Arr c(basis->n_basis());
    for (Index k = 0; k < c.size(); ++k) c[k] = g.next_normal();
    const Scalar norm = std::sqrt(c.square().sum());
    if (norm > 0) c *= target_gauge / norm;
    probes.push_back(TestFunction{basis, std::move(c)});
  }
  return probes;
}

Scalar s_transform(const ChaosElement& f, const TestFunction& eta) {
  require_same_basis(f.basis(), eta.basis);
  if (!(eta.gauge() < 1.0))
    throw std::invalid_argument("test function gauge must be < 1");
  Scalar total = 0;
  for (const auto& [a, c] : f.terms()) {
    Scalar prod = c;
    for (int i = 0; i < a.order(); ++i) prod *= eta.coeffs[a.slot(i)];
    total += prod;
  }
  return total;
}

// ------------------------------------------------------------- noise cells

namespace {

Scalar pow_plus(Scalar x, Scalar a) { return x > 0 ? std::pow(x, a) : 0.0; }

void check_noise_beta(Scalar beta) {
  if (!(beta > 0.0) || !(beta < 0.5))
    throw std::invalid_argument("noise order beta must lie in (0, 1/2)");
}

ChaosElement separable_first_chaos(const BasisPtr& basis, const Arr& time_kernel) {
  // kernel (u,y) = y * time_kernel(cell(u)); coefficients y_j * g_i * sqrt(w).
  Arr values(basis->n_basis());
  for (Index k = 0; k < basis->n_basis(); ++k)
    values[k] = basis->mark_value(k) * time_kernel[basis->time_cell(k)];
  return first_chaos_from_values(basis, values);
}

}  // namespace

ChaosElement noise_element(Scalar beta, Scalar t, const BasisPtr& basis) {
  if (!basis) throw std::invalid_argument("null basis");
  check_noise_beta(beta);
  const TimeGrid& g = basis->grid;
  if (!g.contains(t)) throw std::invalid_argument("noise time outside grid");
  const Scalar inv = 1.0 / (g.h() * std::tgamma(beta + 1.0));
  Arr kappa(g.n_cells());
  for (Index i = 0; i < g.n_cells(); ++i)
    kappa[i] = inv * (pow_plus(t - g.edge(i), beta) -
                      pow_plus(t - g.edge(i + 1), beta));
  return separable_first_chaos(basis, kappa);
}

ChaosElement noise_element_time_avg(Scalar beta, Index time_cell,
                                    const BasisPtr& basis) {
  if (!basis) throw std::invalid_argument("null basis");
  check_noise_beta(beta);
  const TimeGrid& g = basis->grid;
  if (time_cell < 0 || time_cell >= g.n_cells())
    throw std::invalid_argument("noise time cell outside grid");
  const Arr w = rl_cell_weights(beta, g.h(), time_cell + 1);
  Arr kappa = Arr::Zero(g.n_cells());
  for (Index j = 0; j <= time_cell; ++j)
    kappa[j] = w[time_cell - j] / g.h();
  return separable_first_chaos(basis, kappa);
}

ChaosElement indicator_chaos_element(Scalar beta, Scalar t, const BasisPtr& basis) {
  if (!basis) throw std::invalid_argument("null basis");
  const GridFunction w = indicator_kernel_weights(t, beta, basis->grid);
  return separable_first_chaos(basis, w.values);
}

// ------------------------------------------------------------------- norms

Scalar grid_proxy_norm(const ChaosElement& f, Scalar p) {
  if (!(p > 0)) throw std::invalid_argument("norm exponent p must be > 0");
  Scalar total = 0;
  for (const auto& [a, c] : f.terms()) {
    Scalar w = 1.0;
    a.for_each_run([&](Index k, int count) {
      w *= std::pow(static_cast<Scalar>(k) + 2.0,
                    -2.0 * p * static_cast<Scalar>(count));
    });
    total += c * c * w;
  }
  return std::sqrt(total);
}

HermiteNormDetail hermite_first_chaos_norm(const ChaosElement& f, Scalar p,
                                           Index n_max) {
  if (!(p > 0)) throw std::invalid_argument("norm exponent p must be > 0");
  if (n_max < 8) throw std::invalid_argument("hermite norm needs n_max >= 8");
  const BasisPtr& basis = f.basis();
  if (!basis) throw std::invalid_argument("element without basis");

  // Must be pure first chaos with separable coefficients y_j * g_i * sqrt(w).
  Arr g_time = Arr::Zero(basis->grid.n_cells());
  Arr seen = Arr::Zero(basis->grid.n_cells());
  Scalar scale = 0;
  for (const auto& [a, c] : f.terms()) {
    if (a.order() != 1)
      throw std::invalid_argument("hermite norm needs a pure first-chaos element");
    scale = std::max(scale, std::fabs(c));
  }
  for (const auto& [a, c] : f.terms()) {
    const Index k = a.slot(0);
    const Index i = basis->time_cell(k);
    const Scalar denom =
        basis->mark_value(k) * std::sqrt(basis->pi_weight(k));
    const Scalar g = c / denom;
    if (seen[i] != 0.0) {
      if (std::fabs(g - g_time[i]) >
          1e-8 * std::max<Scalar>(1.0, std::fabs(g_time[i])))
        throw std::invalid_argument("hermite norm needs a separable kernel");
    } else {
      g_time[i] = g;
      seen[i] = 1.0;
    }
  }
  // Missing marks on a populated cell would break separability too.
  for (Index k = 0; k < basis->n_basis(); ++k) {
    const Index i = basis->time_cell(k);
    if (seen[i] == 0.0) continue;
    if (f.coefficient(MultiIndex::single(k)) == 0.0 && g_time[i] != 0.0 &&
        basis->mark_value(k) != 0.0)
      throw std::invalid_argument("hermite norm needs a separable kernel");
  }

  // <k_time, xi_n> with k_time piecewise constant: 4-point Gauss per cell.
  static constexpr Scalar GX[4] = {-0.8611363115940526, -0.3399810435848563,
                                   0.3399810435848563, 0.8611363115940526};
  static constexpr Scalar GW[4] = {0.3478548451374538, 0.6521451548625461,
                                   0.6521451548625461, 0.3478548451374538};
  const TimeGrid& grid = basis->grid;
  std::vector<Index> active;
  for (Index i = 0; i < grid.n_cells(); ++i)
    if (seen[i] != 0.0 && g_time[i] != 0.0) active.push_back(i);

  Arr coeffs = Arr::Zero(n_max + 1);
  if (!active.empty()) {
    Arr nodes(static_cast<Index>(active.size()) * 4);
    Arr node_w(nodes.size());
    for (std::size_t q = 0; q < active.size(); ++q) {
      const Index i = active[q];
      const Scalar mid = grid.center(i), half = 0.5 * grid.h();
      for (int r = 0; r < 4; ++r) {
        nodes[static_cast<Index>(q) * 4 + r] = mid + half * GX[r];
        node_w[static_cast<Index>(q) * 4 + r] = half * GW[r] * g_time[i];
      }
    }
    const Mat xi = hermite_functions(nodes, n_max);
    coeffs = (xi.transpose() * node_w.matrix()).array();
  }

  const Scalar m2 = basis->marks.second_moment();
  Scalar total = 0, tail = 0;
  const Index tail_start = n_max - n_max / 8;
  for (Index n = 0; n <= n_max; ++n) {
    const Scalar term =
        std::pow(static_cast<Scalar>(n) + 1.0, -2.0 * p) * coeffs[n] * coeffs[n];
    total += term;
    if (n >= tail_start) tail += term;
  }
  HermiteNormDetail out;
  out.value = std::sqrt(m2 * total);
  out.tail_fraction = total > 0 ? tail / total : 0.0;
  return out;
}

Scalar distribution_norm(const ChaosElement& f, Scalar p, NormMode mode) {
  if (mode == NormMode::grid_proxy) return grid_proxy_norm(f, p);
  return hermite_first_chaos_norm(f, p).value;
}

// ----------------------------------------------------------- serialization

std::string to_sparse_text(const ChaosElement& f) {
  std::ostringstream os;
  char buf[64];
  for (const auto& [a, c] : f.terms()) {
    if (a.empty()) {
      os << "-";
    } else {
      bool first = true;
      a.for_each_run([&](Index k, int count) {
        if (!first) os << ' ';
        first = false;
        os << k << ':' << count;
      });
    }
    std::snprintf(buf, sizeof buf, "%.17g", c);
    os << " -> " << buf << '\n';
  }
  return os.str();
}

ChaosElement from_sparse_text(const BasisPtr& basis, const std::string& text) {
  if (!basis) throw std::invalid_argument("null basis");
  ChaosElement f(basis);
  std::vector<ChaosElement::Term> terms;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto arrow = line.find("->");
    if (arrow == std::string::npos)
      throw std::invalid_argument("sparse text: missing '->'");
    const Scalar c = std::stod(line.substr(arrow + 2));
    MultiIndex a;
    std::istringstream keys(line.substr(0, arrow));
    std::string tok;
    while (keys >> tok) {
      if (tok == "-") break;
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("sparse text: expected k:count");
      const long k = std::stol(tok.substr(0, colon));
      const long count = std::stol(tok.substr(colon + 1));
      if (k < 0 || k >= basis->n_basis())
        throw std::invalid_argument("sparse text: basis id out of range");
      if (count < 1 || count > MultiIndex::max_order)
        throw std::invalid_argument("sparse text: bad multiplicity");
      for (long r = 0; r < count; ++r) a = a.plus(k);
    }
    if (a.order() > basis->chaos_order)
      throw std::invalid_argument("sparse text: order above basis cap");
    terms.push_back({a, c});
  }
  f.set_terms(std::move(terms));
  return f;
}

}  // namespace flp
