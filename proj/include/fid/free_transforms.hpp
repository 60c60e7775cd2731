// Spectral target laws.  A triplet is mapped to its limiting spectral
// distribution through the additive free convolution machinery: the free
// analog of the characteristic exponent, the Cauchy transform obtained by
// Newton inversion with continuation from deep in the upper half plane, and
// boundary densities by extrapolating the imaginary part to the real axis.
#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "fid/levy_measure.hpp"

namespace fid {

// Closed-form references: centered semicircle with the given variance and
// the unit-shape square-singular-value law on [0, 4].
double semicircle_density(double x, double variance);
double semicircle_cdf(double x, double variance);
double marchenko_pastur_density(double x);
double marchenko_pastur_cdf(double x);

struct FreeLawOptions {
  int grid_points = 1501;
  double delta0 = 1e-1;         // largest boundary offset in the ladder
  double delta_min = 1e-7;      // smallest offset the ladder may reach
  double density_tol = 1e-4;    // extrapolation stabilization target
  double scan_threshold = 1e-6; // density level declaring support
};

class FreeLaw {
 public:
  explicit FreeLaw(LevyTriplet mu, FreeLawOptions opt = {});

  // gamma z + a z^2 + int ((1-xz)^{-1} - 1 - xz 1_{|x|<=1}) nu(dx),
  // by direct quadrature against the measure.
  std::complex<double> free_cumulant(std::complex<double> z) const;
  // Same functional against the panel discretization of the measure; the
  // fast route used inside the Newton iteration.
  std::complex<double> free_cumulant_fast(std::complex<double> z) const;

  // G(zeta) for Im zeta > 0, with |1/G + C(G)/G - zeta| <= 1e-10 (1 + |zeta|).
  std::complex<double> cauchy(std::complex<double> zeta) const;

  // Boundary density -Im G(x + i 0)/pi by polynomial extrapolation over a
  // descending ladder of offsets.
  double density(double x) const;
  double density(double x, double tol) const;

  // The whole law is a single point when there is no Gaussian or jump part.
  std::optional<double> point_mass() const;

  double cdf(double x) const;
  std::pair<double, double> support() const;
  double escaped_mass() const;

  struct Grid {
    std::vector<double> x, density, cdf;
    double escaped = 0.0;
    double lo = 0.0, hi = 0.0;  // support estimate at the scan threshold
  };
  const Grid& grid() const;

 private:
  std::complex<double> solve_at(std::complex<double> zeta,
                                std::complex<double> start) const;
  std::complex<double> descend(std::complex<double> zeta) const;
  void build_grid() const;

  LevyTriplet mu_;
  FreeLawOptions opt_;
  double a_eff_ = 0.0;  // Gaussian coefficient plus folded small-jump mass
  std::vector<std::pair<double, double>> atoms_;  // discretized jumps
  double scale_ = 1.0;  // coarse spread estimate seeding ladders and scans
  mutable std::shared_ptr<const Grid> grid_;
};

}  // namespace fid
