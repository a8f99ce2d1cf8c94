#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "flp/types.hpp"

namespace flp {

// Adaptive Simpson on [a,b].  rel_tol is applied against the running whole-
// interval estimate; depth guards runaway recursion on non-integrable inputs.
inline Scalar adaptive_simpson(const std::function<Scalar(Scalar)>& f,
                               Scalar a, Scalar b, Scalar rel_tol = 1e-10,
                               int max_depth = 48) {
  struct Impl {
    const std::function<Scalar(Scalar)>& f;
    Scalar abs_tol;
    Scalar recurse(Scalar a, Scalar b, Scalar fa, Scalar fm, Scalar fb,
                   Scalar whole, int depth) {
      const Scalar m = 0.5 * (a + b);
      const Scalar lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const Scalar flm = f(lm), frm = f(rm);
      const Scalar left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const Scalar right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const Scalar delta = left + right - whole;
      if (depth <= 0) {
        if (std::fabs(delta) > 64.0 * abs_tol)
          throw std::runtime_error("adaptive_simpson: max depth exceeded");
        return left + right + delta / 15.0;
      }
      if (std::fabs(delta) <= 15.0 * abs_tol)
        return left + right + delta / 15.0;
      return recurse(a, m, fa, flm, fm, left, depth - 1) +
             recurse(m, b, fm, frm, fb, right, depth - 1);
    }
  };
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("adaptive_simpson: a > b");
  }
  const Scalar fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const Scalar whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const Scalar scale = std::max(std::fabs(whole), Scalar(1e-300));
  Impl impl{f, rel_tol * scale};
  Scalar r = impl.recurse(a, b, fa, fm, fb, whole, max_depth);
  // One re-pass if the first estimate was badly off-scale.
  if (std::fabs(r) > 16.0 * scale && std::fabs(r) > 0.0) {
    impl.abs_tol = rel_tol * std::fabs(r);
    r = impl.recurse(a, b, fa, fm, fb, whole, max_depth);
  }
  return r;
}

}  // namespace flp
