#include "flp/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flp {

Scalar KernelPreset::operator()(Scalar t, Scalar s) const {
  const Scalar d = t - s;
  switch (kind) {
    case Kind::constant:
      return amplitude;
    case Kind::exponential:
      return amplitude * std::exp(-rate * d);
    case Kind::polynomial:
      return amplitude * std::pow(d, degree);
  }
  return 0.0;
}

KernelPreset constant_kernel(Scalar a) {
  return KernelPreset{KernelPreset::Kind::constant, a, 0.0, 0};
}

KernelPreset exponential_kernel(Scalar a, Scalar rate) {
  return KernelPreset{KernelPreset::Kind::exponential, a, rate, 0};
}

KernelPreset polynomial_kernel(Scalar a, int degree) {
  if (degree < 0)
    throw std::invalid_argument("polynomial kernel degree must be >= 0");
  return KernelPreset{KernelPreset::Kind::polynomial, a, 0.0, degree};
}

Index VolterraProblem::first_solve_cell() const {
  if (!basis) throw std::invalid_argument("null basis");
  return basis->grid.zero_edge_index();
}

Index VolterraProblem::n_solve() const {
  return basis->grid.n_cells() - first_solve_cell();
}

Scalar VolterraProblem::solve_time(Index i) const {
  return basis->grid.center(first_solve_cell() + i);
}

namespace {

// Shared discretization context for all backends.
struct Ctx {
  const VolterraProblem& p;
  Index i0;      // global index of the first solution cell
  Index n;       // number of solution cells
  Scalar h;
  bool has_sigma;
  std::vector<ChaosElement> noise;  // cell-averaged noise per solution cell

  explicit Ctx(const VolterraProblem& prob) : p(prob) {
    if (!prob.basis) throw std::invalid_argument("null basis");
    i0 = prob.first_solve_cell();
    n = prob.n_solve();
    if (n < 1)
      throw std::invalid_argument("horizon must extend past time zero");
    if (static_cast<Index>(prob.forcing.size()) != n)
      throw std::invalid_argument(
          "forcing must hold one element per solution cell");
    for (const ChaosElement& f : prob.forcing)
      if (f.basis() != prob.basis)
        throw std::invalid_argument("forcing element on a different basis");
    h = prob.basis->grid.h();
    has_sigma = prob.sigma.amplitude != 0.0;
    if (has_sigma) {
      if (!(prob.beta > 0.0) || !(prob.beta < 0.5))
        throw std::invalid_argument("beta must lie in (0, 1/2)");
      noise.reserve(static_cast<std::size_t>(n));
      for (Index u = 0; u < n; ++u)
        noise.push_back(
            noise_element_time_avg(prob.beta, i0 + u, prob.basis));
    }
  }

  Scalar t(Index i) const { return p.basis->grid.center(i0 + i); }
  // Weight of node u in the rule for the integral from 0 to t(i).
  Scalar omega(Index i, Index u) const {
    return u < i ? h : (u == i ? 0.5 * h : 0.0);
  }
  Scalar b_at(Index i, Index u) const { return p.b(t(i), t(u)); }
  Scalar s_at(Index i, Index u) const { return p.sigma(t(i), t(u)); }

  bool deterministic() const {
    if (has_sigma) return false;
    for (const ChaosElement& f : p.forcing)
      if (f.max_order() > 0) return false;
    return true;
  }

  // Gauge monitor: max over the triangle of the kernel's proxy norm.
  Scalar gauge_max() const {
    Arr noise_norm = Arr::Zero(n);
    if (has_sigma)
      for (Index u = 0; u < n; ++u)
        noise_norm[u] = grid_proxy_norm(noise[static_cast<std::size_t>(u)],
                                        p.gauge_p);
    Scalar m = 0;
    for (Index i = 0; i < n; ++i)
      for (Index u = 0; u <= i; ++u) {
        const Scalar bb = b_at(i, u);
        const Scalar ss = has_sigma ? s_at(i, u) * noise_norm[u] : 0.0;
        m = std::max(m, std::sqrt(bb * bb + ss * ss));
      }
    return m;
  }

  // One application of the triangular operator to a solution vector.
  std::vector<ChaosElement> apply(const std::vector<ChaosElement>& v) const {
    std::vector<ChaosElement> noise_v;
    if (has_sigma) {
      noise_v.reserve(static_cast<std::size_t>(n));
      for (Index u = 0; u < n; ++u)
        noise_v.push_back(wick_product(noise[static_cast<std::size_t>(u)],
                                       v[static_cast<std::size_t>(u)]));
    }
    std::vector<ChaosElement> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      ChaosElement acc(p.basis);
      for (Index u = 0; u <= i; ++u) {
        const Scalar w = omega(i, u);
        const Scalar bb = b_at(i, u);
        if (bb != 0.0) acc += (w * bb) * v[static_cast<std::size_t>(u)];
        if (has_sigma) {
          const Scalar ss = s_at(i, u);
          if (ss != 0.0)
            acc += (w * ss) * noise_v[static_cast<std::size_t>(u)];
        }
      }
      out.push_back(std::move(acc));
    }
    return out;
  }

  // Scalar variant for fully deterministic problems.
  Mat scalar_matrix() const {
    Mat a = Mat::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index u = 0; u <= i; ++u) a(i, u) = omega(i, u) * b_at(i, u);
    return a;
  }
};

Scalar family_norm(const std::vector<ChaosElement>& v) {
  Scalar s = 0;
  for (const ChaosElement& f : v) {
    const Scalar c = f.coeff_l2_norm();
    s += c * c;
  }
  return std::sqrt(s);
}

bool any_overflow(const std::vector<ChaosElement>& v) {
  for (const ChaosElement& f : v)
    if (f.overflow()) return true;
  return false;
}

// True when the last three entries of norms are non-decreasing.
bool non_contracting(const std::vector<Scalar>& norms) {
  const std::size_t m = norms.size();
  return m >= 3 && norms[m - 1] >= norms[m - 2] && norms[m - 2] >= norms[m - 3];
}

VolterraSolution solve_picard_chaos(const Ctx& ctx, Scalar tol,
                                    Index max_iter) {
  VolterraSolution out;
  std::vector<ChaosElement> u = ctx.p.forcing;
  std::vector<Scalar> updates;
  for (Index it = 0; it < max_iter; ++it) {
    std::vector<ChaosElement> au = ctx.apply(u);
    std::vector<ChaosElement> next;
    next.reserve(static_cast<std::size_t>(ctx.n));
    Scalar delta2 = 0;
    for (Index i = 0; i < ctx.n; ++i) {
      ChaosElement ui =
          ctx.p.forcing[static_cast<std::size_t>(i)] +
          au[static_cast<std::size_t>(i)];
      const Scalar d =
          (ui - u[static_cast<std::size_t>(i)]).coeff_l2_norm();
      delta2 += d * d;
      next.push_back(std::move(ui));
    }
    u = std::move(next);
    updates.push_back(std::sqrt(delta2));
    ++out.iterations;
    if (updates.back() <= tol) {
      out.converged = true;
      break;
    }
    if (non_contracting(updates))
      throw std::runtime_error("picard updates are not contracting");
  }
  out.update_norms = Eigen::Map<const Arr>(updates.data(),
                                           static_cast<Index>(updates.size()));
  out.overflow = any_overflow(u) || any_overflow(ctx.p.forcing);
  out.u = std::move(u);
  return out;
}

VolterraSolution solve_resolvent_chaos(const Ctx& ctx, Scalar tol,
                                       Index max_iter) {
  VolterraSolution out;
  std::vector<ChaosElement> u = ctx.p.forcing;
  std::vector<ChaosElement> term = ctx.p.forcing;
  std::vector<Scalar> norms;
  for (Index n = 1; n <= max_iter; ++n) {
    term = ctx.apply(term);
    const Scalar tn = family_norm(term);
    norms.push_back(tn);
    ++out.iterations;
    for (Index i = 0; i < ctx.n; ++i)
      u[static_cast<std::size_t>(i)] += term[static_cast<std::size_t>(i)];
    if (tn <= tol) {
      out.converged = true;
      break;
    }
    if (non_contracting(norms)) {
      out.diverged = true;
      break;
    }
  }
  out.update_norms =
      Eigen::Map<const Arr>(norms.data(), static_cast<Index>(norms.size()));
  out.overflow = any_overflow(u);
  out.u = std::move(u);
  return out;
}

VolterraSolution solve_deterministic(const Ctx& ctx, VolterraBackend backend,
                                     Scalar tol, Index max_iter) {
  VolterraSolution out;
  Vec j(ctx.n);
  for (Index i = 0; i < ctx.n; ++i)
    j[i] = ctx.p.forcing[static_cast<std::size_t>(i)].constant_part();
  const Mat a = ctx.scalar_matrix();

  Vec u = j;
  std::vector<Scalar> norms;
  if (backend == VolterraBackend::chaos_picard) {
    for (Index it = 0; it < max_iter; ++it) {
      Vec next = j + a * u;
      const Scalar d = (next - u).norm();
      u = next;
      norms.push_back(d);
      ++out.iterations;
      if (d <= tol) {
        out.converged = true;
        break;
      }
      if (non_contracting(norms))
        throw std::runtime_error("picard updates are not contracting");
    }
  } else {
    Vec term = j;
    for (Index n = 1; n <= max_iter; ++n) {
      term = a * term;
      const Scalar tn = term.norm();
      norms.push_back(tn);
      ++out.iterations;
      u += term;
      if (tn <= tol) {
        out.converged = true;
        break;
      }
      if (non_contracting(norms)) {
        out.diverged = true;
        break;
      }
    }
  }
  out.update_norms =
      Eigen::Map<const Arr>(norms.data(), static_cast<Index>(norms.size()));
  out.u.reserve(static_cast<std::size_t>(ctx.n));
  for (Index i = 0; i < ctx.n; ++i)
    out.u.push_back(chaos_constant(ctx.p.basis, u[i]));
  return out;
}

VolterraSolution solve_collocation(const Ctx& ctx,
                                   const std::vector<TestFunction>& probes) {
  if (probes.empty())
    throw std::invalid_argument("collocation backend needs probe functions");
  VolterraSolution out;
  out.collocation.resize(ctx.n, static_cast<Index>(probes.size()));
  for (std::size_t q = 0; q < probes.size(); ++q) {
    const TestFunction& eta = probes[q];
    Arr s_noise = Arr::Zero(ctx.n);
    if (ctx.has_sigma)
      for (Index u = 0; u < ctx.n; ++u)
        s_noise[u] =
            s_transform(ctx.noise[static_cast<std::size_t>(u)], eta);
    Arr sj(ctx.n);
    for (Index i = 0; i < ctx.n; ++i)
      sj[i] = s_transform(ctx.p.forcing[static_cast<std::size_t>(i)], eta);

    Arr u(ctx.n);
    for (Index i = 0; i < ctx.n; ++i) {
      Scalar rhs = sj[i];
      for (Index m = 0; m < i; ++m) {
        Scalar k = ctx.b_at(i, m);
        if (ctx.has_sigma) k += ctx.s_at(i, m) * s_noise[m];
        rhs += ctx.omega(i, m) * k * u[m];
      }
      Scalar k_ii = ctx.b_at(i, i);
      if (ctx.has_sigma) k_ii += ctx.s_at(i, i) * s_noise[i];
      const Scalar denom = 1.0 - ctx.omega(i, i) * k_ii;
      if (std::fabs(denom) < 1e-12)
        throw std::runtime_error("collocation system is singular");
      u[i] = rhs / denom;
    }
    out.collocation.col(static_cast<Index>(q)) = u.matrix();
  }
  out.converged = true;
  return out;
}

}  // namespace

VolterraSolution solve_volterra(const VolterraProblem& p,
                                VolterraBackend backend, Scalar tol,
                                Index max_iter,
                                const std::vector<TestFunction>& probes) {
  if (!(tol >= 0)) throw std::invalid_argument("tolerance must be >= 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  const Ctx ctx(p);

  VolterraSolution out;
  if (backend == VolterraBackend::s_collocation) {
    out = solve_collocation(ctx, probes);
  } else if (ctx.deterministic()) {
    out = solve_deterministic(ctx, backend, tol, max_iter);
  } else if (backend == VolterraBackend::chaos_picard) {
    out = solve_picard_chaos(ctx, tol, max_iter);
  } else {
    out = solve_resolvent_chaos(ctx, tol, max_iter);
  }
  out.kernel_gauge_max = ctx.gauge_max();
  out.gauge_ok = p.gauge_limit <= 0.0 || out.kernel_gauge_max < p.gauge_limit;
  out.certified =
      out.converged && !out.diverged && !out.overflow && out.gauge_ok;
  return out;
}

ResolventResult resolvent_kernel(const VolterraProblem& p, Index n_max,
                                 Scalar tol) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const Ctx ctx(p);
  if (ctx.n > 64)
    throw std::invalid_argument(
        "resolvent triangle is capped at 64 solution cells");

  using Triangle = std::vector<std::vector<ChaosElement>>;
  auto make_triangle = [&](bool as_kernel) {
    Triangle a(static_cast<std::size_t>(ctx.n));
    for (Index i = 0; i < ctx.n; ++i) {
      a[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(i) + 1);
      for (Index m = 0; m <= i; ++m) {
        ChaosElement k = chaos_constant(p.basis, ctx.b_at(i, m));
        if (ctx.has_sigma)
          k += ctx.s_at(i, m) * ctx.noise[static_cast<std::size_t>(m)];
        if (!as_kernel) k *= ctx.omega(i, m);
        a[static_cast<std::size_t>(i)].push_back(std::move(k));
      }
    }
    return a;
  };

  const Triangle a = make_triangle(false);  // weighted operator entries
  Triangle power = a;
  Triangle sum = a;

  auto frobenius = [&](const Triangle& x) {
    Scalar s = 0;
    for (const auto& row : x)
      for (const ChaosElement& e : row) {
        const Scalar c = e.coeff_l2_norm();
        s += c * c;
      }
    return std::sqrt(s);
  };

  ResolventResult out;
  std::vector<Scalar> norms{frobenius(a)};
  out.n_used = 1;
  for (Index n = 2; n <= n_max; ++n) {
    Triangle next(static_cast<std::size_t>(ctx.n));
    for (Index i = 0; i < ctx.n; ++i) {
      next[static_cast<std::size_t>(i)].reserve(
          static_cast<std::size_t>(i) + 1);
      for (Index m = 0; m <= i; ++m) {
        ChaosElement acc(p.basis);
        for (Index u = m; u <= i; ++u)
          acc += wick_product(
              power[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)],
              a[static_cast<std::size_t>(u)][static_cast<std::size_t>(m)]);
        next[static_cast<std::size_t>(i)].push_back(std::move(acc));
      }
    }
    power = std::move(next);
    const Scalar tn = frobenius(power);
    norms.push_back(tn);
    ++out.n_used;
    for (Index i = 0; i < ctx.n; ++i)
      for (Index m = 0; m <= i; ++m)
        sum[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] +=
            power[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
    if (tol > 0 && tn <= tol) break;
    if (non_contracting(norms)) {
      out.diverged = true;
      break;
    }
  }

  // Convert operator entries back to kernel values H = B / omega.
  out.H.resize(static_cast<std::size_t>(ctx.n));
  for (Index i = 0; i < ctx.n; ++i) {
    out.H[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(i) +
                                               1);
    for (Index m = 0; m <= i; ++m) {
      ChaosElement e =
          sum[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
      e *= 1.0 / ctx.omega(i, m);
      out.overflow = out.overflow || e.overflow();
      out.H[static_cast<std::size_t>(i)].push_back(std::move(e));
    }
  }
  out.term_norms =
      Eigen::Map<const Arr>(norms.data(), static_cast<Index>(norms.size()));
  return out;
}

Arr resolvent_column(const VolterraProblem& p, Index m_solve, Index n_max) {
  const Ctx ctx(p);
  if (ctx.has_sigma)
    throw std::invalid_argument(
        "resolvent_column requires a deterministic kernel (sigma == 0)");
  if (m_solve < 0 || m_solve >= ctx.n)
    throw std::invalid_argument("column index outside the solution range");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");

  const Mat a = ctx.scalar_matrix();
  Vec term = Vec::Zero(ctx.n);
  term[m_solve] = 1.0;
  term = a * term;  // first series term: A e_m
  Vec acc = term;
  for (Index n = 2; n <= n_max; ++n) {
    term = a * term;
    acc += term;
  }
  Arr h_col = Arr::Zero(ctx.n);
  for (Index i = m_solve; i < ctx.n; ++i)
    h_col[i] = acc[i] / ctx.omega(i, m_solve);
  return h_col;
}

}  // namespace flp
