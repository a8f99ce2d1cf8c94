#include "flp/frac_ops.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace flp {

namespace {

void check_beta(Scalar beta) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument("fractional order must lie in (0,1)");
}

Scalar pow_plus(Scalar x, Scalar a) { return x > 0 ? std::pow(x, a) : 0.0; }

// Second central difference of x^{a}, a = beta+1, at integer k:
// (k+1)^a - 2k^a + (k-1)^a.  Direct evaluation cancels ~k^2*eps, so switch to
// the even Taylor series of (1+x)^a + (1-x)^a - 2 at x = 1/k for large k.
Scalar power_second_diff(Scalar a, Index k) {
  if (k == 0) return 1.0;
  const Scalar kk = static_cast<Scalar>(k);
  if (k < 64) {
    return std::pow(kk + 1, a) - 2 * std::pow(kk, a) + pow_plus(kk - 1, a);
  }
  const Scalar x2 = 1.0 / (kk * kk);
  // 2 * [ C(a,2) x^2 + C(a,4) x^4 + C(a,6) x^6 + C(a,8) x^8 ]
  const Scalar c2 = a * (a - 1) / 2.0;
  const Scalar c4 = c2 * (a - 2) * (a - 3) / 12.0;
  const Scalar c6 = c4 * (a - 4) * (a - 5) / 30.0;
  const Scalar c8 = c6 * (a - 6) * (a - 7) / 56.0;
  return 2.0 * std::pow(kk, a) * x2 * (c2 + x2 * (c4 + x2 * (c6 + x2 * c8)));
}

Arr weights_cache(Scalar beta, Scalar h, Index n) {
  const Scalar scale = std::pow(h, beta) / std::tgamma(beta + 2.0);
  Arr w(n);
  for (Index k = 0; k < n; ++k)
    w[k] = scale * power_second_diff(beta + 1.0, k);
  return w;
}

Arr convolve_direct(const Arr& w, const Arr& f, Side side) {
  const Index n = f.size();
  Arr out = Arr::Zero(n);
  if (side == Side::minus) {
    for (Index i = 0; i < n; ++i) {
      Scalar acc = 0;
      for (Index k = 0; k < n - i; ++k) acc += w[k] * f[i + k];
      out[i] = acc;
    }
  } else {
    for (Index i = 0; i < n; ++i) {
      Scalar acc = 0;
      for (Index k = 0; k <= i; ++k) acc += w[k] * f[i - k];
      out[i] = acc;
    }
  }
  return out;
}

Arr convolve_fft(const Arr& w, const Arr& f, Side side) {
  const Index n = f.size();
  Index m = 1;
  while (m < 2 * n) m <<= 1;

  std::vector<std::complex<Scalar>> wa(m), fa(m), spec(m);
  for (Index k = 0; k < n; ++k) wa[k] = w[k];
  for (Index i = 0; i < n; ++i) {
    // minus side is a correlation: convolve against the reversed signal.
    fa[i] = (side == Side::minus) ? f[n - 1 - i] : f[i];
  }
  Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> wz(m), fz(m);
  fft.fwd(wz, wa);
  fft.fwd(fz, fa);
  for (Index i = 0; i < m; ++i) spec[i] = wz[i] * fz[i];
  std::vector<std::complex<Scalar>> conv(m);
  fft.inv(conv, spec);

  Arr out(n);
  for (Index i = 0; i < n; ++i) {
    const Index pos = (side == Side::minus) ? (n - 1 - i) : i;
    out[i] = conv[pos].real();
  }
  return out;
}

}  // namespace

Arr rl_cell_weights(Scalar beta, Scalar h, Index n) {
  check_beta(beta);
  if (!(h > 0) || n < 1) throw std::invalid_argument("rl_cell_weights: bad grid");
  return weights_cache(beta, h, n);
}

GridFunction rl_fractional_integral(const GridFunction& f, Scalar beta,
                                    Side side, ConvMethod method) {
  check_beta(beta);
  const Index n = f.grid.n_cells();
  const Arr w = weights_cache(beta, f.grid.h(), n);
  const bool use_fft =
      method == ConvMethod::fft || (method == ConvMethod::automatic && n >= 1024);
  Arr out = use_fft ? convolve_fft(w, f.values, side)
                    : convolve_direct(w, f.values, side);
  return GridFunction(f.grid, std::move(out));
}

Scalar rl_pointwise(const GridFunction& f, Scalar beta, Side side, Scalar t) {
  check_beta(beta);
  const TimeGrid& g = f.grid;
  const Scalar inv = 1.0 / std::tgamma(beta + 1.0);
  Scalar acc = 0;
  for (Index j = 0; j < g.n_cells(); ++j) {
    const Scalar a = g.edge(j), b = g.edge(j + 1);
    const Scalar cell =
        (side == Side::minus)
            ? pow_plus(b - t, beta) - pow_plus(a - t, beta)
            : pow_plus(t - a, beta) - pow_plus(t - b, beta);
    acc += f.values[j] * cell;
  }
  return acc * inv;
}

GridFunction indicator_kernel_weights(Scalar t, Scalar beta,
                                      const TimeGrid& grid) {
  if (!(beta > 0.0) || !(beta < 0.5))
    throw std::invalid_argument("indicator kernel needs beta in (0, 1/2)");
  if (!grid.contains(t)) throw std::invalid_argument("t outside grid");
  grid.zero_edge_index();  // validates that 0 is an edge

  const Scalar a = beta + 1.0;
  const Scalar inv = 1.0 / (grid.h() * std::tgamma(beta + 2.0));
  Arr w(grid.n_cells());
  for (Index j = 0; j < grid.n_cells(); ++j) {
    const Scalar sj = grid.edge(j), sj1 = grid.edge(j + 1);
    w[j] = inv * (pow_plus(t - sj, a) - pow_plus(t - sj1, a) -
                  pow_plus(-sj, a) + pow_plus(-sj1, a));
  }
  return GridFunction(grid, std::move(w));
}

Scalar truncation_tail_bound(Scalar beta, Scalar t, Scalar t_min) {
  if (!(beta > 0.0) || !(beta < 0.5))
    throw std::invalid_argument("truncation bound needs beta in (0, 1/2)");
  if (!(t_min < 0) || !(t > 0))
    throw std::invalid_argument("truncation bound needs t_min < 0 < t");
  const Scalar g = std::tgamma(beta);
  return t * t * std::pow(-t_min, 2.0 * beta - 1.0) /
         ((1.0 - 2.0 * beta) * g * g);
}

TruncationReport truncation_report(Scalar beta, Scalar t, const TimeGrid& grid,
                                   Scalar budget) {
  if (!(budget > 0) || !(budget < 1))
    throw std::invalid_argument("truncation budget must lie in (0,1)");
  TruncationReport r;
  r.tail_bound = truncation_tail_bound(beta, t, grid.t_min());
  const GridFunction w = indicator_kernel_weights(t, beta, grid);
  r.truncated_norm2 = (w.values.square() * grid.h()).sum();
  r.relative_deficit = r.tail_bound / (r.tail_bound + r.truncated_norm2);

  const Scalar g = std::tgamma(beta);
  const Scalar bound_req = budget * r.truncated_norm2 / (1.0 - budget);
  r.required_t_min =
      -std::pow(t * t / ((1.0 - 2.0 * beta) * g * g * bound_req),
                1.0 / (1.0 - 2.0 * beta));
  return r;
}

}  // namespace flp
