#include "flp/hermite.hpp"

#include <cmath>

#include "doctest.h"

using namespace flp;

TEST_CASE("hermite functions are orthonormal on a wide trapezoid") {
  const Index n_max = 8;
  const Index pts = 24001;
  Arr x(pts);
  const Scalar lo = -12.0, hi = 12.0;
  const Scalar dx = (hi - lo) / static_cast<Scalar>(pts - 1);
  for (Index i = 0; i < pts; ++i) x[i] = lo + dx * static_cast<Scalar>(i);
  const Mat xi = hermite_functions(x, n_max);
  for (Index a = 0; a <= n_max; ++a)
    for (Index b = a; b <= n_max; ++b) {
      const Scalar ip = (xi.col(a).array() * xi.col(b).array()).sum() * dx;
      CHECK(ip == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("hermite values at zero match the closed forms") {
  Arr x(1);
  x[0] = 0.0;
  const Mat xi = hermite_functions(x, 4);
  const Scalar pi4 = std::pow(M_PI, -0.25);
  CHECK(xi(0, 0) == doctest::Approx(pi4).epsilon(1e-14));
  CHECK(xi(0, 1) == doctest::Approx(0.0).scale(1.0));
  CHECK(xi(0, 2) == doctest::Approx(-pi4 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(xi(0, 3) == doctest::Approx(0.0).scale(1.0));
  CHECK(xi(0, 4) == doctest::Approx(pi4 * std::sqrt(3.0) / (2.0 * std::sqrt(2.0)))
                        .epsilon(1e-13));
}

TEST_CASE("power-kernel coefficients match a 40-digit reference") {
  // int_{-inf}^t (t-u)^{beta-1} xi_n(u) du at beta=0.3, t=0.7, evaluated
  // independently with tanh-sinh quadrature at 40-digit precision.
  const Scalar ref[6] = {2.6916748661153139,   0.70266315685091808,
                         -0.26945641043613159, -1.3565790254694597,
                         0.17453551517847617,  0.68678189250688413};
  const Arr c = power_kernel_hermite_coeffs(0.3, 0.7, 5);
  for (Index n = 0; n <= 5; ++n)
    CHECK(c[n] == doctest::Approx(ref[n]).epsilon(1e-10).scale(0.1));
}
