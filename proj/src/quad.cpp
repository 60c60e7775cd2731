#include "fid/util/quad.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fid/util/error.hpp"

namespace fid::quad {

namespace {

// Error estimates from the boost integrators are conservative; accept a
// result when the estimate is within a slack factor of the request or tiny
// relative to the value.
void check_error(double err, double l1, double tol, const char* what) {
  double scale = std::max(1.0, l1);
  if (!(err <= 1e4 * tol * scale)) {
    throw Error(errc::quadrature_nonconvergence,
                std::string(what) + ": error estimate " + std::to_string(err) +
                    " exceeds tolerance budget");
  }
}

}  // namespace

double finite(const RealFn& f, double a, double b, double tol) {
  if (!(a < b)) return 0.0;
  double width = b - a;
  double scale = std::max(std::fabs(a), std::fabs(b));
  // Slivers narrower than the rounding scale of their endpoints leave
  // tanh_sinh no representable interior nodes; one midpoint sample is already
  // exact to the width squared there.
  if (width <= 1e-10 * std::max(1.0, scale)) {
    double y = f(a + 0.5 * width);
    return std::isfinite(y) ? width * y : 0.0;
  }
  boost::math::quadrature::tanh_sinh<double> integrator(15);
  double err = 0.0, l1 = 0.0;
  // When the interval is narrow relative to where it sits, the integrator's
  // endpoint-complement floor can land below one ulp of the endpoints and its
  // node placement asserts.  Integrating the shifted image over [0, width]
  // keeps both endpoints in the small-argument branch, which approaches them
  // through complements and never collides.
  if (width <= 0.05 * scale) {
    auto g = [&](double u) {
      double y = f(a + u);
      return std::isfinite(y) ? y : 0.0;
    };
    double v = integrator.integrate(g, 0.0, width, tol, &err, &l1);
    check_error(err, l1, tol, "finite quadrature");
    return v;
  }
  // Deep refinement nodes can round to the endpoints themselves, where an
  // integrable singularity makes f blow up.  The tanh_sinh weight there is
  // far below double precision, so a zero stand-in does not move the value.
  auto g = [&](double x) {
    double y = f(x);
    if ((x == a || x == b) && !std::isfinite(y)) return 0.0;
    return y;
  };
  double v = integrator.integrate(g, a, b, tol, &err, &l1);
  check_error(err, l1, tol, "finite quadrature");
  return v;
}

double finite_split(const RealFn& f, double a, double b,
                    std::vector<double> breakpoints, double tol) {
  breakpoints.push_back(a);
  breakpoints.push_back(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  double total = 0.0;
  double lo = a;
  for (double p : breakpoints) {
    if (p <= lo || p > b) continue;
    if (p > lo) total += finite(f, lo, std::min(p, b), tol);
    lo = p;
  }
  if (lo < b) total += finite(f, lo, b, tol);
  return total;
}

double upper_tail(const RealFn& f, double a, double tol) {
  boost::math::quadrature::exp_sinh<double> integrator(13);
  double err = 0.0, l1 = 0.0;
  // exp_sinh integrates over (0, inf); shift the origin.
  auto g = [&](double t) { return f(a + t); };
  double v = integrator.integrate(g, tol, &err, &l1);
  check_error(err, l1, tol, "tail quadrature");
  return v;
}

std::complex<double> finite_c(const std::function<std::complex<double>(double)>& f,
                              double a, double b, double tol) {
  double re = finite([&](double x) { return f(x).real(); }, a, b, tol);
  double im = finite([&](double x) { return f(x).imag(); }, a, b, tol);
  return {re, im};
}

std::complex<double> upper_tail_c(const std::function<std::complex<double>(double)>& f,
                                  double a, double tol) {
  double re = upper_tail([&](double x) { return f(x).real(); }, a, tol);
  double im = upper_tail([&](double x) { return f(x).imag(); }, a, tol);
  return {re, im};
}

}  // namespace fid::quad
