// Special functions used by the kernel catalog and the radial profiles.
#pragma once

namespace fid {

// Exponential integral E1(x) = int_x^inf e^{-s}/s ds, x > 0.
double expint_e1(double x);

// Standard normal density and upper tail 1 - Phi(x).
double normal_pdf(double x);
double normal_upper(double x);

// Upper incomplete gamma int_x^inf s^{a-1} e^{-s} ds.
double gamma_upper(double a, double x);

}  // namespace fid
