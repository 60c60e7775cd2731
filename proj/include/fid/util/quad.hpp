// Adaptive quadrature wrappers.  tanh-sinh for finite intervals (tolerates
// integrable endpoint singularities), exp-sinh for semi-infinite tails.
// All routines target absolute accuracy ~1e-9 or better on the measures in
// the catalog and raise quadrature_nonconvergence when the error estimate
// does not support that.
#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace fid::quad {

using RealFn = std::function<double(double)>;

// Integral over the finite interval (a, b).  Interior kinks must be passed
// as breakpoints by the caller; endpoint singularities are fine.
double finite(const RealFn& f, double a, double b, double tol = 1e-10);

// Integral over (a, b) split at the given interior breakpoints.
double finite_split(const RealFn& f, double a, double b,
                    std::vector<double> breakpoints, double tol = 1e-10);

// Integral over (a, +inf) for integrands with an integrable decaying tail.
double upper_tail(const RealFn& f, double a, double tol = 1e-10);

std::complex<double> finite_c(const std::function<std::complex<double>(double)>& f,
                              double a, double b, double tol = 1e-10);

std::complex<double> upper_tail_c(const std::function<std::complex<double>(double)>& f,
                                  double a, double tol = 1e-10);

}  // namespace fid::quad
