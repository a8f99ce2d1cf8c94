#include "flp/hermite.hpp"

#include <cmath>
#include <stdexcept>

namespace flp {

namespace {

// 8-point Gauss-Legendre on [-1,1].
constexpr int GL_N = 8;
constexpr Scalar GL_X[GL_N] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr Scalar GL_W[GL_N] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

// Accumulate w * xi_n(u) into acc[n] for all n, one recurrence sweep.
void accumulate_hermite(Scalar u, Scalar w, Arr& acc) {
  const Index n_max = acc.size() - 1;
  const Scalar xi0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * u * u);
  Scalar prev = 0.0, cur = xi0;
  acc[0] += w * cur;
  for (Index n = 0; n < n_max; ++n) {
    const Scalar nn = static_cast<Scalar>(n);
    const Scalar next = std::sqrt(2.0 / (nn + 1.0)) * u * cur -
                        std::sqrt(nn / (nn + 1.0)) * prev;
    prev = cur;
    cur = next;
    acc[n + 1] += w * cur;
  }
}

}  // namespace

Mat hermite_functions(const Arr& x, Index n_max) {
  if (n_max < 0) throw std::invalid_argument("hermite_functions: n_max < 0");
  Mat out(x.size(), n_max + 1);
  const Arr xi0 = std::pow(M_PI, -0.25) * (-0.5 * x.square()).exp();
  out.col(0) = xi0.matrix();
  if (n_max == 0) return out;
  out.col(1) = (std::sqrt(2.0) * x * xi0).matrix();
  for (Index n = 1; n < n_max; ++n) {
    const Scalar nn = static_cast<Scalar>(n);
    out.col(n + 1) = (std::sqrt(2.0 / (nn + 1.0)) * x * out.col(n).array() -
                      std::sqrt(nn / (nn + 1.0)) * out.col(n - 1).array())
                         .matrix();
  }
  return out;
}

Arr power_kernel_hermite_coeffs(Scalar beta, Scalar t, Index n_max) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument("power kernel needs beta in (0,1)");
  if (n_max < 0) throw std::invalid_argument("n_max < 0");

  Arr acc = Arr::Zero(n_max + 1);
  const Scalar omega = std::sqrt(2.0 * static_cast<Scalar>(n_max) + 1.0);

  // Singular piece on (t - delta, t]: (1/beta) int_0^{delta^beta} xi(t - v^{1/beta}) dv.
  // Geometric panels toward v = 0, where v^{1/beta} kinks the integrand.
  const Scalar delta = std::min(Scalar(0.05), 0.2 / omega);
  const Scalar v_hi = std::pow(delta, beta);
  {
    Scalar top = v_hi;
    for (int k = 0; k < 52; ++k) {
      const Scalar bottom = k == 51 ? 0.0 : 0.5 * top;
      const Scalar mid = 0.5 * (top + bottom), half = 0.5 * (top - bottom);
      for (int q = 0; q < GL_N; ++q) {
        const Scalar v = mid + half * GL_X[q];
        const Scalar u = t - std::pow(v, 1.0 / beta);
        accumulate_hermite(u, half * GL_W[q] / beta, acc);
      }
      top = bottom;
    }
  }

  // Smooth piece on [-L, t - delta]: panels shorter than half a wavelength
  // of xi, and near the cut shorter than a third of the gap to t, where the
  // power factor steepens.
  const Scalar L = omega + 12.0;
  const Scalar lo = -std::max(L, std::fabs(t) + 2.0);
  const Scalar max_panel = 1.5 / omega;
  Scalar right = t - delta;
  while (right > lo) {
    const Scalar pw = std::min(max_panel, 0.3 * (t - right));
    const Scalar left = std::max(lo, right - pw);
    const Scalar mid = 0.5 * (right + left), half = 0.5 * (right - left);
    for (int q = 0; q < GL_N; ++q) {
      const Scalar u = mid + half * GL_X[q];
      const Scalar w = half * GL_W[q] * std::pow(t - u, beta - 1.0);
      accumulate_hermite(u, w, acc);
    }
    right = left;
  }
  return acc;
}

}  // namespace flp
