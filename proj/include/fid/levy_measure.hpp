// Scalar Levy machinery: jump measures on R\{0} held per sign as radial
// atoms plus a radial density, functionals of the measure (truncated
// moments, characteristic exponent integrals, log-tail test), polar
// decomposition, and inverse-CDF jump samplers.
#pragma once

#include <array>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fid/util/interp.hpp"
#include "fid/util/rng.hpp"

namespace fid {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Radial atom at r > 0 carrying positive mass.
struct Atom {
  double r = 0.0;
  double mass = 0.0;
};

// How a radial density on (0, inf) is described.  The stored profile is
// turned into a plain dr-density internally:
//   KFunction: rho(r) = k(r) / r        (k nonincreasing for selfdecomposable laws)
//   GFunction: rho(r) = g(r^2)          (g completely monotone for type-G laws)
//   LFunction: rho(r) = l(r)            (l nonincreasing for Jurek-class laws)
//   RawDensity: rho(r) = f(r)
enum class ProfileKind { KFunction, GFunction, LFunction, RawDensity };

// Decay class of the density at +inf; drives the characteristic-exponent
// tail integration strategy.
enum class TailClass { Bounded, Exponential, PowerLaw };

struct RadialDensity {
  ProfileKind kind = ProfileKind::RawDensity;
  std::function<double(double)> profile;
  double lo = 0.0;
  double hi = kInf;
  TailClass tail = TailClass::Exponential;
  double power_alpha = 0.0;  // PowerLaw: rho ~ c r^{-1-alpha}
  // Exact power behavior rho(r) = c r^{-1-origin_alpha} on (0, 1e-6] when
  // lo = 0 and the density is too singular to evaluate near the origin
  // (alpha >= 1 overflows doubles); the truncated-region integrals then run
  // in a substituted variable against the r^2-weighted density, which stays
  // bounded.  Negative: unspecified, quadrature runs all the way down.
  double origin_alpha = -1.0;
  // Optional analytic continuation of rho to Re z > 0, enabling contour
  // rotation of oscillatory tail integrals.
  std::function<std::complex<double>(std::complex<double>)> analytic;
  // Optional exact tail mass nu_xi((r, inf)); quadrature otherwise.
  std::function<double(double)> tail_mass;
  // Interior points where rho is singular or kinked; quadrature splits here.
  std::vector<double> breakpoints;

  double density(double r) const;
};

// One sign of the measure: nu(xi dr) = lambda * (atoms + density).
struct RadialSide {
  double lambda = 1.0;
  std::vector<Atom> atoms;
  std::optional<RadialDensity> dens;
  bool empty() const { return atoms.empty() && !dens.has_value(); }
};

// Draws signed jumps with |x| > eps from a normalized restriction of the
// measure.  Built once (inverse-CDF tables with 4096 log-spaced knots per
// sign), then cheap and thread-compatible.
class JumpSampler {
 public:
  double total_mass() const { return mass_; }
  double operator()(Rng& rng) const;

 private:
  friend class LevyMeasure;
  struct Part {
    int sign = 1;
    bool atomic = false;
    double mass = 0.0;
    std::vector<double> atom_cum;
    std::vector<double> atom_r;
    MonotoneInterp inv_cdf;  // cumulative mass in [0, mass] -> radius
  };
  std::vector<Part> parts_;
  std::vector<double> part_cum_;
  double mass_ = 0.0;
};

// Discrete stand-in for the measure used by the free-probability engine:
// signed atoms (original atoms plus quadrature nodes), a Gaussian fold-in
// for the small-jump mass, and the dropped far-tail mass.
struct DiscretizedMeasure {
  std::vector<std::pair<double, double>> atoms;  // (x, mass)
  double sigma2_small = 0.0;                     // int_{|x|<r_min} x^2 nu(dx)
  double dropped_tail = 0.0;
  double min_x = 0.0, max_x = 0.0;               // signed support bounds kept
};

struct PolarDecomposition {
  // Index 0: xi = -1, index 1: xi = +1.
  std::array<double, 2> lambda{0.0, 0.0};
  std::array<const RadialSide*, 2> radial{nullptr, nullptr};
};

class LevyMeasure {
 public:
  LevyMeasure() = default;  // the zero measure

  static LevyMeasure zero() { return {}; }
  // Signed atoms (x_i, m_i), x_i != 0, m_i > 0.
  static LevyMeasure from_atoms(const std::vector<std::pair<double, double>>& atoms);
  static LevyMeasure from_sides(RadialSide neg, RadialSide pos);

  bool is_zero() const { return sides_[0].empty() && sides_[1].empty(); }
  const RadialSide& side(int sign) const { return sides_[sign > 0 ? 1 : 0]; }
  // Density value of nu at signed point x (0 off the density support).
  double density_at(double x) const;

  // nu({|x| > eps}); eps = 0 only for finite-activity measures.
  double mass_above(double eps) const;
  // nu of the radial half-open interval (a, b] on the given side.
  double radial_mass(int sign, double a, double b) const;
  // int_(a,b] x nu(dx) over one side, radial coordinates.
  double radial_x_integral(int sign, double a, double b) const;
  // int_{eps < |x| <= 1} x nu(dx): the truncation compensator.
  double truncated_mean_above(double eps) const;
  // int_{|x| <= eps} x^2 nu(dx).
  double x2_below(double eps) const;
  // int (e^{izx} - 1 - izx 1_{|x|<=1}) nu(dx).
  std::complex<double> lk_integral(double z) const;
  // int (1/(1-xz) - 1 - xz 1_{|x|<=1}) nu(dx); needs Im z < 0 or a pole-free
  // real z.
  std::complex<double> free_lk_integral(std::complex<double> z) const;
  // int_{|x|>2} log|x| nu(dx) by doubling intervals; nullopt when the growth
  // test declares divergence.
  std::optional<double> ilog_integral() const;
  void require_ilog() const;

  double min_abs_support() const;
  double max_abs_support() const;

  PolarDecomposition polar_decompose() const;

  JumpSampler sampler_above(double eps) const;
  DiscretizedMeasure discretize(double r_min = 1e-8, double rel_tail = 1e-12) const;

 private:
  std::array<RadialSide, 2> sides_;
};

// Characteristic triplet (gamma, a, nu) with jump truncation 1_{|x|<=1}.
struct LevyTriplet {
  double gamma = 0.0;
  double a = 0.0;
  LevyMeasure nu;

  // Characteristic exponent  C(z) = i gamma z - a z^2 / 2 + lk_integral(z).
  std::complex<double> cumulant(double z) const;
};

}  // namespace fid
