// Deterministic integrand kernels h >= 0 on [0, T_h) and the catalog of
// hereditary classes they generate.  Monotone kernels expose occupation-time
// machinery (time spent above a level and its derivative), which is what the
// pushforward of a jump measure through the integral map needs.
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fid/catalog.hpp"

namespace fid {

enum class Monotonicity { Decreasing, Increasing, Constant, None };

// What the driving law must satisfy for the integral against this kernel to
// define a law (and for the class membership statement to hold).
enum class DriverCondition { AnyID, ILog, Selfdecomposable, Symmetric, SymmetricILog, AClassDriver };

class Kernel {
 public:
  const std::string& name() const;
  // End of the time support; may be +inf.
  double support_end() const;
  double operator()(double t) const;
  Monotonicity monotonicity() const;
  double h_max() const;
  bool needs_ilog() const;  // infinite horizon: driver must satisfy the log-tail test

  double int_h() const;
  double int_h2() const;
  double int_h_upto(double T) const;
  double int_h2_upto(double T) const;

  // Leb{t : h(t) > w} and |d/dw| of it; levels w > 0.
  double time_above(double w) const;
  double time_above_deriv(double w) const;
  const std::vector<double>& level_kinks() const;  // w where time_above_deriv kinks
  // h^{-1}(y) clamped to [0, T_h]; monotone kernels only.
  double inverse(double y) const;
  // int over {t : h(t) > w} of h^2.
  double h2_above(double w) const;

  // Smallest horizon T with int_T^{T_h} h^2 <= tol and (for decreasing
  // kernels) h(T) * xbar <= eps.  Returns T_h itself when finite.
  double horizon(double tol, double xbar, double eps) const;

  DriverCondition driver_condition() const;

  struct Impl;
  explicit Kernel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

 private:
  std::shared_ptr<const Impl> impl_;
};

// Catalog keys: ou_exp, linear_t, log_inv, cos_arc, sqrtlog_one,
// sqrtlog_half, e1_inv, normal_tail_inv, phi_over_t_inv, const(c,len).
Kernel make_kernel(const std::string& name, const Params& params = {});
std::vector<std::string> kernel_names();

// Programmatic kernels: validated with a log-growth test when the support is
// infinite; no occupation machinery, moments by quadrature.
Kernel make_custom_kernel(std::string name, std::function<double(double)> h,
                          double support_end);

struct ClassRow {
  std::string id;       // hereditary class tag
  std::string kernel;   // catalog kernel key realizing it
  std::string h_text;   // human-readable kernel description
  std::string driver;   // admissibility condition on the driving law
};
// The eleven stochastic-integral representations the tool knows about.
std::vector<ClassRow> class_catalog();

}  // namespace fid
