// Safeguarded Newton inversion of monotone scalar maps.  Falls back to
// bisection whenever a Newton step leaves the bracket or fails to shrink the
// residual, so convergence only needs a valid initial bracket.
#pragma once

#include <cmath>
#include <functional>

#include "fid/util/error.hpp"

namespace fid {

struct InvertOptions {
  double tol = 1e-12;   // on |f(x) - y|, scaled by (1 + |y|)
  double xtol = 5e-14;  // on the last step, scaled by (1 + |x|); keeps the
                        // root localized even where f is nearly flat
  int max_iter = 200;
  // Optional derivative; bisection-only when absent.
  std::function<double(double)> deriv;
};

// Solves f(x) = y for monotone f on [lo, hi].  Requires y to lie between
// f(lo) and f(hi); raises bracket_violation otherwise and not_monotone when
// evaluations contradict a monotone profile.
inline double invert_monotone(const std::function<double(double)>& f, double y,
                              double lo, double hi, const InvertOptions& opt = {}) {
  if (!(lo < hi)) throw Error(errc::bracket_violation, "empty bracket");
  double flo = f(lo) - y;
  double fhi = f(hi) - y;
  double target_tol = opt.tol * (1.0 + std::fabs(y));
  if (flo == 0.0 || std::fabs(flo) <= target_tol * 1e-3) return lo;
  if (fhi == 0.0 || std::fabs(fhi) <= target_tol * 1e-3) return hi;
  if (flo * fhi > 0.0)
    throw Error(errc::bracket_violation, "target value outside bracket range");

  double a = lo, b = hi, fa = flo;
  double x = 0.5 * (a + b);
  double step = b - a;
  for (int it = 0; it < opt.max_iter; ++it) {
    double fx = f(x) - y;
    bool settled = std::fabs(fx) <= target_tol;
    if (settled && std::fabs(step) <= opt.xtol * (1.0 + std::fabs(x))) return x;
    if (fa * fx <= 0.0) {
      b = x;
    } else {
      a = x;
      fa = fx;
    }
    if (!(a < b)) {
      if (settled) return x;
      throw Error(errc::not_monotone, "bracket collapsed without convergence");
    }
    double next = 0.0;
    bool newton_ok = false;
    if (opt.deriv) {
      double d = opt.deriv(x);
      if (std::isfinite(d) && d != 0.0) {
        next = x - fx / d;
        newton_ok = (next > a && next < b);
      }
    }
    if (!newton_ok) next = 0.5 * (a + b);
    step = next - x;
    x = next;
  }
  // Bisection halves the bracket every step; reaching here means the
  // function is numerically flat around y, return the midpoint.
  double fx = f(x) - y;
  if (std::fabs(fx) <= 1e-6 * (1.0 + std::fabs(y))) return x;
  throw Error(errc::not_monotone, "inversion did not converge");
}

}  // namespace fid
