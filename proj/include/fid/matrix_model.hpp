// Hermitian random-matrix increments driven by a scalar triplet: a drift
// multiple of the identity, a Gaussian part calibrated so traces against any
// test matrix match the directional average of the scalar exponent, and
// compound-Poisson rank-one jumps x u u^* with Haar directions.  Small jumps
// below a cutoff are either dropped or folded into the Gaussian part with
// matching covariance.
#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fid/levy_measure.hpp"
#include "fid/util/rng.hpp"

namespace fid {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

Vec random_unit_vector(int d, Rng& rng);

// Hermitian Gaussian matrix with Var(tr(G A)) = sigma2 ((tr A)^2 + tr A^2):
// a GUE block with entry variance sigma2 plus an independent N(0, sigma2)
// multiple of the identity.
Mat gaussian_hermitian(int d, double sigma2, Rng& rng);

// E[g(p)] for p the squared moduli of a Haar unit vector (flat Dirichlet
// weights), evaluated against the eigenvalues of the test matrix:
// E_u g(<u, A u>) = E_p g(sum eig_i p_i).  Deterministic quadrature, d <= 3.
double direction_average(const std::vector<double>& eig,
                         const std::function<double(double)>& g);

struct JumpRecord {
  double t = 0.0;  // arrival time
  double x = 0.0;  // signed scalar jump size
  Vec u;           // unit direction
};

struct MatrixSample {
  Mat m;
  Mat gaussian;           // Gaussian part actually added (diagnostics)
  double drift = 0.0;     // scalar multiplying the identity
  std::vector<JumpRecord> jumps;  // recorded when keep_jumps is set
};

struct EnsembleOptions {
  double eps = 1e-3;          // jump cutoff; must lie in (0, 1]
  bool ar_substitute = true;  // Gaussian stand-in for jumps below eps
  double jump_cap = 1e7;      // bound on the expected jump count per sample
  bool keep_jumps = false;
};

class MatrixEnsemble {
 public:
  MatrixEnsemble(int d, LevyTriplet mu, EnsembleOptions opt = {});

  int dim() const { return d_; }
  double jump_rate() const { return rate_; }       // d nu({|x| > eps})
  double drift_coefficient() const { return drift_eff_; }
  double gaussian_sigma2() const { return sigma2_entry_; }

  MatrixSample sample(Rng& rng, double horizon = 1.0) const;

  // exp(d E_u C_mu(z <u, A u>)): the predicted characteristic function of
  // tr(M A) at unit horizon, with the directional average done by
  // deterministic quadrature against a table of the scalar exponent.
  std::complex<double> predicted_cf(const std::vector<double>& eig, double z) const;

 private:
  int d_;
  LevyTriplet mu_;
  EnsembleOptions opt_;
  double drift_eff_ = 0.0;     // gamma - int_{eps<|x|<=1} x nu
  double sigma2_entry_ = 0.0;  // (a + AR substitute) / (d + 1)
  double rate_ = 0.0;
  std::optional<JumpSampler> sampler_;
};

// P(p_1 in (t1, t2)) for flat Dirichlet weights in dimension d.
double dirichlet_first_band(int d, double t1, double t2);
// P(p_1 > beta p_2), flat Dirichlet weights, beta >= 0.
double dirichlet_first_dominates(int d, double beta);

// Dual-route occupancy check on the jump measure of the matrix process:
// exact rates of six jump events (radial bands, a direction band, trace-sign
// events) against Poisson counts from the simulated jump stream.
struct PolarSetCheck {
  std::string name;
  double expected = 0.0;   // exact event rate integrated over the horizon
  double observed = 0.0;   // simulated count
  double zscore = 0.0;
};

std::vector<PolarSetCheck> polar_form_check(const LevyTriplet& mu, int d,
                                            double band_lo, double band_hi,
                                            double horizon, Rng& rng);

}  // namespace fid
