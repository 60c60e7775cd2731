#include "fid/util/special.hpp"

#include <cmath>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace fid {

double expint_e1(double x) {
  if (x > 700.0) return 0.0;  // below double underflow anyway
  return boost::math::expint(1, x);
}

double normal_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.3989422804014327;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double normal_upper(double x) {
  constexpr double inv_sqrt2 = 0.7071067811865476;
  return 0.5 * std::erfc(x * inv_sqrt2);
}

double gamma_upper(double a, double x) {
  return boost::math::tgamma(a, x);
}

}  // namespace fid
