// The law of int_0^{T_h} h(t) dX_t for a scalar Levy driver X: its
// characteristic exponent by direct quadrature, its triplet (drift,
// Gaussian variance scaled by int h^2, jump measure pushed forward through
// the occupation-time formula), and independent closed-form references for
// the radial profiles of the classes in the catalog.
#pragma once

#include <complex>
#include <string>

#include "fid/kernel.hpp"
#include "fid/levy_measure.hpp"

namespace fid {

struct IntegratedLaw {
  LevyTriplet triplet;
  double horizon = 0.0;  // finite simulation horizon used for reporting
};

// C_{mu_h}(z) = int_0^{T_h} C_mu(h(t) z) dt, evaluated in level space for
// monotone kernels.  Drivers for infinite-horizon kernels must pass the
// log-tail test.
std::complex<double> cumulant_of_integral(const LevyTriplet& mu, const Kernel& h,
                                          double z);

// gamma_h = gamma int h + int h(t) D(h(t)) dt, where
// D(w) = int x (1_{|wx|<=1} - 1_{|x|<=1}) nu(dx) re-centers the truncation.
double integrated_drift(const LevyTriplet& mu, const Kernel& h);

// nu_h(B) = int_0^{T_h} nu({x : h(t) x in B}) dt via occupation times.
LevyMeasure pushforward_measure(const LevyMeasure& nu, const Kernel& h);

IntegratedLaw integrate_law(const LevyTriplet& mu, const Kernel& h);

// Independent references for the radial density of nu_h, one per catalog
// class id (see class_catalog()).  They evaluate the published
// representation formulas directly, bypassing the occupation machinery.
double radial_profile_reference(const std::string& class_id, const LevyTriplet& mu,
                                const Kernel& h, int sign, double r);

}  // namespace fid
