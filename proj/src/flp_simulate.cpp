#include "flp/flp_simulate.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

#include "flp/quadrature.hpp"

namespace flp {

namespace {

Scalar pow_plus(Scalar x, Scalar a) { return x > 0 ? std::pow(x, a) : 0.0; }

void check_process_beta(Scalar beta) {
  if (!(beta > 0.0) || !(beta < 0.5))
    throw std::invalid_argument("process order beta must lie in (0, 1/2)");
}

TruncationReport enforce_budget(Scalar beta, const TimeGrid& grid,
                                Scalar budget) {
  TruncationReport r = truncation_report(beta, grid.t_max(), grid, budget);
  if (r.relative_deficit > budget) {
    char msg[192];
    std::snprintf(msg, sizeof msg,
                  "truncation variance deficit %.3g exceeds budget %.3g at "
                  "t_max; need t_min <= %.6g",
                  r.relative_deficit, budget, r.required_t_min);
    throw std::runtime_error(msg);
  }
  return r;
}

// Edge-indexed kernel difference G(k) = k_+^{beta+1} - (k-1)_+^{beta+1}; the
// Wiener sum at edge e is  scale * sum_j [G(e-j) - G(j0-j)] dX_j  with
// scale = h^beta / Gamma(beta+2), j0 the zero edge.  This is exactly
// indicator_kernel_weights(edge(e)) applied to the increments.
Arr edge_kernel_diffs(Scalar beta, Index n_edges) {
  Arr g = Arr::Zero(n_edges);
  const Scalar a = beta + 1.0;
  for (Index k = 1; k < n_edges; ++k)
    g[k] = pow_plus(static_cast<Scalar>(k), a) -
           pow_plus(static_cast<Scalar>(k - 1), a);
  return g;
}

// Linear convolution (g * x)(e) = sum_j g[e-j] x[j] for e = 0..n_edges-1.
Mat convolve_paths(const Arr& g, const Mat& increments) {
  const Index n = increments.cols();
  const Index n_edges = g.size();
  Index m = 1;
  while (m < n + n_edges) m <<= 1;

  Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> ga(m), gz(m);
  for (Index k = 0; k < n_edges; ++k) ga[k] = g[k];
  fft.fwd(gz, ga);

  Mat out(increments.rows(), n_edges);
  std::vector<std::complex<Scalar>> xa(m), xz(m), conv(m);
  for (Index p = 0; p < increments.rows(); ++p) {
    std::fill(xa.begin(), xa.end(), std::complex<Scalar>(0));
    for (Index j = 0; j < n; ++j) xa[j] = increments(p, j);
    fft.fwd(xz, xa);
    for (Index i = 0; i < m; ++i) xz[i] *= gz[i];
    fft.inv(conv, xz);
    for (Index e = 0; e < n_edges; ++e) out(p, e) = conv[e].real();
  }
  return out;
}

Mat wiener_paths_from_increments(const Mat& increments, const TimeGrid& grid,
                                 Scalar beta) {
  const Index n_edges = grid.n_cells() + 1;
  const Index j0 = grid.zero_edge_index();
  const Scalar scale =
      std::pow(grid.h(), beta) / std::tgamma(beta + 2.0);

  const Arr g = edge_kernel_diffs(beta, n_edges);
  Mat conv = convolve_paths(g, increments);

  // subtract the e-independent term sum_j G(j0-j) dX_j, i.e. conv at j0
  for (Index p = 0; p < conv.rows(); ++p) {
    const Scalar s0 = conv(p, j0);
    for (Index e = 0; e < n_edges; ++e)
      conv(p, e) = scale * (conv(p, e) - s0);
    conv(p, j0) = 0.0;  // exact by construction; pin it bitwise
  }
  return conv;
}

}  // namespace

PathSample simulate_flp_paths(const LevyModel& model, const TimeGrid& grid,
                              Scalar beta, Index n_paths, std::uint64_t seed,
                              Scalar deficit_budget) {
  check_process_beta(beta);
  TruncationReport trunc = enforce_budget(beta, grid, deficit_budget);

  IncrementSample inc = sample_increments(model, grid, seed, n_paths);
  PathSample out{grid, beta, wiener_paths_from_increments(inc.increments, grid, beta),
                 seed, trunc};
  return out;
}

Mat observe_flp_at(const LevyModel& model, const TimeGrid& grid, Scalar beta,
                   const std::vector<Scalar>& ts, Index n_paths,
                   std::uint64_t seed, Scalar deficit_budget) {
  check_process_beta(beta);
  enforce_budget(beta, grid, deficit_budget);
  if (ts.empty()) throw std::invalid_argument("observe_flp_at: empty t list");

  const auto n_obs = static_cast<Index>(ts.size());
  std::vector<Arr> w;
  w.reserve(ts.size());
  Arr drift_corr(n_obs);
  const DiscretizedMeasure m = sampling_measure(model);
  const Scalar drift = m.first_moment() * grid.h();
  for (Index q = 0; q < n_obs; ++q) {
    w.push_back(indicator_kernel_weights(ts[q], beta, grid).values);
    drift_corr[q] = drift * w.back().sum();
  }

  Mat out = Mat::Zero(n_paths, n_obs);
  for_each_path_jumps(model, grid, seed, n_paths,
                      [&](Index p, const std::vector<Jump>& jumps) {
                        for (Index q = 0; q < n_obs; ++q) {
                          const Arr& wq = w[static_cast<std::size_t>(q)];
                          Scalar acc = 0;
                          for (const Jump& j : jumps) acc += wq[j.cell] * j.mark;
                          out(p, q) = acc - drift_corr[q];
                        }
                      });
  return out;
}

PathSample transform_alpha_to_beta(const PathSample& alpha_paths, Scalar alpha,
                                   Scalar beta) {
  check_process_beta(beta);
  check_process_beta(alpha);
  if (!(beta > alpha))
    throw std::invalid_argument("transform needs beta > alpha");
  if (alpha_paths.beta != alpha)
    throw std::invalid_argument("alpha does not match the sampled paths");

  const TimeGrid& grid = alpha_paths.grid;
  const Index n = grid.n_cells();
  Mat inc(alpha_paths.values.rows(), n);
  for (Index j = 0; j < n; ++j)
    inc.col(j) = alpha_paths.values.col(j + 1) - alpha_paths.values.col(j);

  PathSample out{grid, beta,
                 wiener_paths_from_increments(inc, grid, beta - alpha),
                 alpha_paths.seed,
                 truncation_report(beta, grid.t_max(), grid, 0.01)};
  return out;
}

MomentTable empirical_moments_of(const Mat& columns,
                                 const std::vector<Scalar>& ts) {
  if (columns.cols() != static_cast<Index>(ts.size()))
    throw std::invalid_argument("moments: column/t mismatch");
  const Index n = columns.rows();
  if (n < 2) throw std::invalid_argument("moments need >= 2 paths");

  MomentTable tab;
  for (Index q = 0; q < columns.cols(); ++q) {
    const auto col = columns.col(q);
    const Scalar mean = col.mean();
    const Arr d = col.array() - mean;
    const Scalar nn = static_cast<Scalar>(n);
    const Scalar var = d.square().sum() / (nn - 1.0);
    const Scalar m4 = d.square().square().sum() / nn;
    // Var(s^2) ~ (m4 - s^4 (n-3)/(n-1)) / n
    const Scalar var_of_var =
        std::max(Scalar(0), (m4 - var * var * (nn - 3.0) / (nn - 1.0)) / nn);
    tab.t.push_back(ts[static_cast<std::size_t>(q)]);
    tab.mean.push_back(mean);
    tab.variance.push_back(var);
    tab.stderr_mean.push_back(std::sqrt(var / nn));
    tab.stderr_var.push_back(std::sqrt(var_of_var));
  }
  return tab;
}

MomentTable empirical_moments(const PathSample& paths,
                              const std::vector<Scalar>& ts) {
  Mat cols(paths.values.rows(), static_cast<Index>(ts.size()));
  for (std::size_t q = 0; q < ts.size(); ++q) {
    const Scalar raw = (ts[q] - paths.grid.t_min()) / paths.grid.h();
    const Scalar rounded = std::round(raw);
    if (std::fabs(raw - rounded) > 1e-9)
      throw std::invalid_argument("moment time must sit on a cell edge");
    cols.col(static_cast<Index>(q)) =
        paths.values.col(static_cast<Index>(rounded));
  }
  return empirical_moments_of(cols, ts);
}

Scalar indicator_norm2_quadrature(Scalar beta, Scalar t, Scalar t_min) {
  check_process_beta(beta);
  if (!(t > 0) || !(t_min < 0))
    throw std::invalid_argument("norm quadrature needs t_min < 0 < t");
  const Scalar g1 = std::tgamma(beta + 1.0);
  // On [0, t] the kernel is (t-s)^beta / Gamma(beta+1): closed form.
  const Scalar pos = std::pow(t, 2.0 * beta + 1.0) /
                     ((2.0 * beta + 1.0) * g1 * g1);
  const auto m2 = [&](Scalar s) {
    const Scalar m = (std::pow(t - s, beta) - std::pow(-s, beta)) / g1;
    return m * m;
  };
  const Scalar neg = adaptive_simpson(m2, t_min, 0.0, 1e-11);
  return pos + neg;
}

}  // namespace flp
