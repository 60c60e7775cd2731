// Monotone (PCHIP) interpolation with clamped evaluation outside the knot
// range.  Monotone data in gives a monotone interpolant out, which keeps
// inverse-CDF tables and CDF grids order-preserving.
#pragma once

#include <memory>
#include <vector>

namespace fid {

class MonotoneInterp {
 public:
  MonotoneInterp() = default;
  // Knots must be strictly increasing; at least 4 of them.
  MonotoneInterp(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double x_min() const { return x0_; }
  double x_max() const { return x1_; }
  bool valid() const { return impl_ != nullptr; }

 private:
  std::shared_ptr<const void> impl_;
  double x0_ = 0.0, x1_ = 0.0, y0_ = 0.0, y1_ = 0.0;
};

}  // namespace fid
