#include "flp/sde.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include "flp/hermite.hpp"
#include "flp/rng.hpp"

namespace flp {

Index SdeProblem::first_solve_cell() const {
  if (!basis) throw std::invalid_argument("null basis");
  return basis->grid.zero_edge_index();
}

Index SdeProblem::n_solve() const {
  return basis->grid.n_cells() - first_solve_cell();
}

Scalar SdeProblem::solve_time(Index i) const {
  return basis->grid.center(first_solve_cell() + i);
}

namespace {

void check_on_basis(const BasisPtr& basis, const ChaosElement& e,
                    const char* what) {
  if (e.basis() && e.basis() != basis)
    throw std::invalid_argument(std::string(what) +
                                " lives on a different basis");
}

struct Ctx {
  const SdeProblem& p;
  Index i0, n;
  Scalar h;
  std::vector<ChaosElement> noise;  // cell-averaged noise per solve cell

  explicit Ctx(const SdeProblem& prob) : p(prob) {
    if (!prob.basis) throw std::invalid_argument("null basis");
    if (!(prob.beta > 0.0) || !(prob.beta < 0.5))
      throw std::invalid_argument("beta must lie in (0, 1/2)");
    i0 = prob.first_solve_cell();
    n = prob.n_solve();
    if (n < 1)
      throw std::invalid_argument("horizon must extend past time zero");
    check_on_basis(prob.basis, prob.u0, "initial value");
    check_on_basis(prob.basis, prob.b.c0, "drift constant part");
    check_on_basis(prob.basis, prob.b.c1, "drift multiplier");
    check_on_basis(prob.basis, prob.sigma.c0, "noise coefficient constant part");
    check_on_basis(prob.basis, prob.sigma.c1, "noise coefficient multiplier");
    h = prob.basis->grid.h();
    const bool need_noise =
        !prob.sigma.c0.terms().empty() || !prob.sigma.c1.terms().empty();
    if (need_noise) {
      noise.reserve(static_cast<std::size_t>(n));
      for (Index u = 0; u < n; ++u)
        noise.push_back(noise_element_time_avg(prob.beta, i0 + u, prob.basis));
    }
  }

  bool scalar_path() const {
    return noise.empty() && p.u0.max_order() == 0 &&
           p.b.c0.max_order() == 0 && p.b.c1.max_order() == 0;
  }

  // Right-hand side sample at solve cell u for a given state.
  ChaosElement rhs(Index u, const ChaosElement& state) const {
    ChaosElement out = p.b.c0;
    if (!p.b.c1.terms().empty()) out += wick_product(p.b.c1, state);
    if (!noise.empty()) {
      ChaosElement sig = p.sigma.c0;
      if (!p.sigma.c1.terms().empty())
        sig += wick_product(p.sigma.c1, state);
      out += wick_product(sig, noise[static_cast<std::size_t>(u)]);
    }
    return out;
  }
};

// --- weighted-norm operator machinery ---------------------------------

Scalar rho_weight(const MultiIndex& a, Scalar p) {
  Scalar w = 1.0;
  a.for_each_run([&](Index k, int count) {
    w *= std::pow(static_cast<Scalar>(k) + 2.0,
                  -2.0 * p * static_cast<Scalar>(count));
  });
  return w;
}

// Multiset difference g - a; false when a is not contained in g.
bool mi_subtract(const MultiIndex& g, const MultiIndex& a, MultiIndex* out) {
  MultiIndex r;
  int j = 0;
  for (int i = 0; i < g.order(); ++i) {
    if (j < a.order() && g.slot(i) == a.slot(j)) {
      ++j;
    } else if (j < a.order() && a.slot(j) < g.slot(i)) {
      return false;
    } else {
      r = r.plus(g.slot(i));
    }
  }
  if (j != a.order()) return false;
  *out = r;
  return true;
}

// rho-adjoint of Wick multiplication by G.
ChaosElement adjoint_mult(const ChaosElement& g, const ChaosElement& v,
                          Scalar p) {
  ChaosElement out(v.basis() ? v.basis() : g.basis());
  std::vector<ChaosElement::Term> terms;
  for (const auto& [gv, gc] : g.terms()) {
    const Scalar w = rho_weight(gv, p) * gc;
    for (const auto& [vv, vc] : v.terms()) {
      MultiIndex b;
      if (mi_subtract(vv, gv, &b)) terms.push_back({b, w * vc});
    }
  }
  out.set_terms(std::move(terms));
  return out;
}

using ElementMap = std::function<ChaosElement(const ChaosElement&)>;

// Operator norm of T in the weighted coefficient norm, by power iteration
// on T*T.  start_slots seeds the iteration's support.
Scalar operator_norm(const BasisPtr& basis, const ElementMap& apply,
                     const ElementMap& adjoint,
                     const std::vector<Index>& start_slots, Scalar p) {
  Scalar best = 0;
  for (std::uint64_t restart = 0; restart < 2; ++restart) {
    SplitMix64 rng = SplitMix64::stream(0x0e555ull, restart);
    ChaosElement v = chaos_constant(basis, rng.next_normal());
    for (Index k : start_slots)
      v.add_term(MultiIndex::single(k), rng.next_normal());
    Scalar nv = grid_proxy_norm(v, p);
    if (nv == 0) continue;
    v *= 1.0 / nv;
    Scalar est = 0;
    for (int it = 0; it < 120; ++it) {
      ChaosElement tv = apply(v);
      const Scalar num = grid_proxy_norm(tv, p);
      if (num == 0) {
        est = 0;
        break;
      }
      const Scalar prev = est;
      est = num;  // ||T v|| with ||v|| = 1
      ChaosElement av = adjoint(tv);
      const Scalar na = grid_proxy_norm(av, p);
      if (na == 0) break;
      av *= 1.0 / na;
      v = std::move(av);
      if (it > 2 && std::fabs(est - prev) <= 1e-11 * std::max<Scalar>(1, est))
        break;
    }
    best = std::max(best, est);
  }
  return best;
}

std::vector<Index> collect_slots(std::initializer_list<const ChaosElement*> es,
                                 Index cap = 4096) {
  std::vector<Index> slots;
  std::vector<bool> seen;
  for (const ChaosElement* e : es) {
    if (!e->basis()) continue;
    seen.resize(static_cast<std::size_t>(e->basis()->n_basis()), false);
    for (const auto& [a, c] : e->terms())
      for (int i = 0; i < a.order(); ++i) {
        const Index k = a.slot(i);
        if (!seen[static_cast<std::size_t>(k)]) {
          seen[static_cast<std::size_t>(k)] = true;
          slots.push_back(k);
          if (static_cast<Index>(slots.size()) >= cap) return slots;
        }
      }
  }
  return slots;
}

}  // namespace

CoefficientReport validate_coefficients(const SdeProblem& p, Scalar gauge_p) {
  if (!(gauge_p > 0))
    throw std::invalid_argument("gauge exponent must be > 0");
  const Ctx ctx(p);
  CoefficientReport rep;

  const BasisPtr& basis = p.basis;
  const bool has_b1 = !p.b.c1.terms().empty();
  const bool has_s1 = !p.sigma.c1.terms().empty();

  if (has_b1)
    rep.lipschitz_b = operator_norm(
        basis, [&](const ChaosElement& w) { return wick_product(p.b.c1, w); },
        [&](const ChaosElement& v) { return adjoint_mult(p.b.c1, v, gauge_p); },
        collect_slots({&p.b.c1}), gauge_p);
  if (has_s1)
    rep.lipschitz_sigma = operator_norm(
        basis,
        [&](const ChaosElement& w) { return wick_product(p.sigma.c1, w); },
        [&](const ChaosElement& v) {
          return adjoint_mult(p.sigma.c1, v, gauge_p);
        },
        collect_slots({&p.sigma.c1}), gauge_p);

  if (!ctx.noise.empty()) {
    for (Index u = 0; u < ctx.n; ++u) {
      const Scalar g =
          grid_proxy_norm(ctx.noise[static_cast<std::size_t>(u)], gauge_p);
      if (g > rep.noise_gauge_max) {
        rep.noise_gauge_max = g;
        rep.noise_argmax = u;
      }
    }
  }

  // Full affine map at the dominant noise cell, composed exactly as the
  // solver applies it.
  if (has_s1 && rep.noise_argmax >= 0) {
    const ChaosElement& xi =
        ctx.noise[static_cast<std::size_t>(rep.noise_argmax)];
    rep.c_eff = operator_norm(
        basis,
        [&](const ChaosElement& w) {
          ChaosElement out = wick_product(wick_product(p.sigma.c1, w), xi);
          if (has_b1) out += wick_product(p.b.c1, w);
          return out;
        },
        [&](const ChaosElement& v) {
          ChaosElement out =
              adjoint_mult(p.sigma.c1, adjoint_mult(xi, v, gauge_p), gauge_p);
          if (has_b1) out += adjoint_mult(p.b.c1, v, gauge_p);
          return out;
        },
        collect_slots({&p.b.c1, &p.sigma.c1, &xi}), gauge_p);
  } else {
    rep.c_eff = rep.lipschitz_b;
  }

  // Growth: gauge of the state-free part plus the Lipschitz constant.
  Scalar g0 = grid_proxy_norm(p.b.c0, gauge_p);
  if (!ctx.noise.empty() && !p.sigma.c0.terms().empty())
    for (Index u = 0; u < ctx.n; ++u)
      g0 = std::max(
          g0, grid_proxy_norm(
                  p.b.c0 + wick_product(p.sigma.c0,
                                        ctx.noise[static_cast<std::size_t>(u)]),
                  gauge_p));
  rep.growth_bound = g0 + rep.c_eff;
  return rep;
}

SdeSolution picard_solve(const SdeProblem& p, Scalar tol, Index max_iter,
                         const ChaosElement* initial_guess) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be > 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  const Ctx ctx(p);

  const CoefficientReport rep = validate_coefficients(p, p.gauge_p);
  if (ctx.h * rep.c_eff >= 0.5) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "step guard violated: h * C_eff = %.3g >= 0.5",
                  ctx.h * rep.c_eff);
    throw std::invalid_argument(msg);
  }

  SdeSolution out;
  out.c_eff = rep.c_eff;

  ChaosElement start = initial_guess ? *initial_guess : p.u0;
  check_on_basis(p.basis, start, "initial guess");
  std::vector<ChaosElement> u(static_cast<std::size_t>(ctx.n), start);

  std::vector<Scalar> updates;
  bool hit_tol = false;
  for (Index it = 0; it < max_iter; ++it) {
    // One sweep: U_i = U0 + sum_u omega(i,u) rhs(u, U_u), via prefix sums.
    std::vector<ChaosElement> next;
    next.reserve(static_cast<std::size_t>(ctx.n));
    ChaosElement prefix(p.basis);  // h * sum of rhs over cells < i
    Scalar delta = 0;
    for (Index i = 0; i < ctx.n; ++i) {
      const ChaosElement f = ctx.rhs(i, u[static_cast<std::size_t>(i)]);
      ChaosElement ui = p.u0 + prefix + (0.5 * ctx.h) * f;
      delta = std::max(
          delta, grid_proxy_norm(ui - u[static_cast<std::size_t>(i)],
                                 p.gauge_p));
      prefix += ctx.h * f;
      next.push_back(std::move(ui));
    }
    u = std::move(next);
    updates.push_back(delta);
    ++out.iterations;
    if (delta <= tol) {
      hit_tol = true;
      break;
    }
  }

  out.update_norms = Eigen::Map<const Arr>(updates.data(),
                                           static_cast<Index>(updates.size()));
  if (out.update_norms.size() > 1) {
    out.decay_ratios.resize(out.update_norms.size() - 1);
    for (Index k = 1; k < out.update_norms.size(); ++k)
      out.decay_ratios[k - 1] =
          out.update_norms[k - 1] > 0
              ? out.update_norms[k] / out.update_norms[k - 1]
              : 0.0;
  }
  if (!hit_tol) {
    char msg[160];
    const Scalar last_ratio =
        out.decay_ratios.size() > 0
            ? out.decay_ratios[out.decay_ratios.size() - 1]
            : 1.0;
    std::snprintf(msg, sizeof msg,
                  "picard did not reach tol %.3g in %lld iterations; last "
                  "update %.3g, decay ratio %.3g",
                  tol, static_cast<long long>(max_iter),
                  updates.empty() ? 0.0 : updates.back(), last_ratio);
    throw std::runtime_error(msg);
  }

  out.converged = true;
  for (const ChaosElement& e : u) out.overflow = out.overflow || e.overflow();
  out.certified = out.converged && !out.overflow;
  out.u = std::move(u);
  return out;
}

ChaosElement noise_prefix_integral(Scalar beta, const BasisPtr& basis,
                                   Index i_solve) {
  if (!basis) throw std::invalid_argument("null basis");
  const Index i0 = basis->grid.zero_edge_index();
  const Index n = basis->grid.n_cells() - i0;
  if (i_solve < 0 || i_solve >= n)
    throw std::invalid_argument("solve cell outside the solution range");
  const Scalar h = basis->grid.h();
  Arr coeffs = Arr::Zero(basis->n_basis());
  for (Index u = 0; u <= i_solve; ++u) {
    const Scalar w = u < i_solve ? h : 0.5 * h;
    const ChaosElement e = noise_element_time_avg(beta, i0 + u, basis);
    for (const auto& [a, c] : e.terms()) coeffs[a.slot(0)] += w * c;
  }
  return first_chaos(basis, coeffs);
}

Scalar noise_difference_norm2(Scalar beta, Scalar p, Scalar t, Scalar s,
                              Index n_max) {
  if (!(beta > 0.0) || !(beta < 0.5))
    throw std::invalid_argument("beta must lie in (0, 1/2)");
  if (!(p > 0)) throw std::invalid_argument("norm exponent p must be > 0");
  if (t == s) return 0.0;
  const Arr ct = power_kernel_hermite_coeffs(beta, t, n_max);
  const Arr cs = power_kernel_hermite_coeffs(beta, s, n_max);
  const Scalar inv_gamma = 1.0 / std::tgamma(beta);
  Scalar total = 0;
  for (Index n = 0; n <= n_max; ++n) {
    const Scalar d = (ct[n] - cs[n]) * inv_gamma;
    total += std::pow(static_cast<Scalar>(n) + 1.0, -2.0 * p) * d * d;
  }
  return total;
}

HolderReport holder_noise_check(
    Scalar beta, Scalar gauge_p,
    const std::vector<std::pair<Scalar, Scalar>>& t_pairs, Index n_max) {
  if (t_pairs.size() < 4)
    throw std::invalid_argument("holder check needs at least 4 time pairs");
  const Index m = static_cast<Index>(t_pairs.size());
  HolderReport rep;
  rep.log_gap.resize(m);
  rep.log_norm2.resize(m);
  for (Index i = 0; i < m; ++i) {
    const auto [t, s] = t_pairs[static_cast<std::size_t>(i)];
    if (t == s)
      throw std::invalid_argument("holder check pairs must have t != s");
    rep.log_gap[i] = std::log(std::fabs(t - s));
    rep.log_norm2[i] =
        std::log(noise_difference_norm2(beta, gauge_p, t, s, n_max));
  }
  const Scalar xm = rep.log_gap.mean();
  const Scalar ym = rep.log_norm2.mean();
  const Scalar sxx = ((rep.log_gap - xm) * (rep.log_gap - xm)).sum();
  if (sxx == 0)
    throw std::invalid_argument("holder check needs distinct gap sizes");
  rep.slope = ((rep.log_gap - xm) * (rep.log_norm2 - ym)).sum() / sxx;
  rep.intercept = ym - rep.slope * xm;
  rep.max_residual =
      (rep.log_norm2 - (rep.intercept + rep.slope * rep.log_gap))
          .abs()
          .maxCoeff();
  return rep;
}

}  // namespace flp
