#include "fid/util/interp.hpp"

// math.h first: the boost header calls unqualified isnan and needs the
// global-namespace overloads in scope.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include "fid/util/error.hpp"

namespace fid {

using BoostPchip = boost::math::interpolators::pchip<std::vector<double>>;

MonotoneInterp::MonotoneInterp(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size() || x.size() < 4)
    throw Error(errc::invalid_config, "interpolation table needs >= 4 knots");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1]))
      throw Error(errc::not_monotone, "interpolation knots not strictly increasing");
  }
  x0_ = x.front();
  x1_ = x.back();
  y0_ = y.front();
  y1_ = y.back();
  impl_ = std::make_shared<BoostPchip>(std::move(x), std::move(y));
}

double MonotoneInterp::operator()(double x) const {
  if (!impl_) throw Error(errc::invalid_config, "evaluating empty interpolant");
  if (x <= x0_) return y0_;
  if (x >= x1_) return y1_;
  return (*static_cast<const BoostPchip*>(impl_.get()))(x);
}

}  // namespace fid
