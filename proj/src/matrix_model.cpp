#include "fid/matrix_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <unordered_map>

#include "fid/util/error.hpp"
#include "fid/util/interp.hpp"
#include "fid/util/quad.hpp"

namespace fid {
namespace {

using cplx = std::complex<double>;

struct ExponentTable {
  double radius = 0.0;
  MonotoneInterp re, im;
};

// Tabulates C_mu on [-R, R]; the midpoint knot pins the kink that stable
// exponents have at the origin.
std::shared_ptr<const ExponentTable> build_table(const LevyTriplet& mu, double R) {
  const int n = 801;
  std::vector<double> w(n), re(n), im(n);
  for (int i = 0; i < n; ++i) {
    w[i] = -R + 2.0 * R * i / (n - 1);
    cplx c = mu.cumulant(w[i]);
    re[i] = c.real();
    im[i] = c.imag();
  }
  auto t = std::make_shared<ExponentTable>();
  t->radius = R;
  t->re = MonotoneInterp(w, re);
  t->im = MonotoneInterp(w, im);
  return t;
}

}  // namespace

Vec random_unit_vector(int d, Rng& rng) {
  Vec u(d);
  double n2 = 0.0;
  do {
    for (int i = 0; i < d; ++i) u[i] = complex_normal(rng);
    n2 = u.squaredNorm();
  } while (n2 < 1e-280);
  return u / std::sqrt(n2);
}

Mat gaussian_hermitian(int d, double sigma2, Rng& rng) {
  Mat g = Mat::Zero(d, d);
  const double s = std::sqrt(sigma2);
  const double so = s / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    g(i, i) = s * std_normal(rng);
    for (int j = i + 1; j < d; ++j) {
      cplx v(so * std_normal(rng), so * std_normal(rng));
      g(i, j) = v;
      g(j, i) = std::conj(v);
    }
  }
  const double xi = s * std_normal(rng);
  g.diagonal().array() += xi;
  return g;
}

double direction_average(const std::vector<double>& eig,
                         const std::function<double(double)>& g) {
  const int d = static_cast<int>(eig.size());
  if (d == 1) return g(eig[0]);
  if (d == 2)
    return quad::finite(
        [&](double p) { return g(eig[0] * p + eig[1] * (1.0 - p)); }, 0.0, 1.0,
        1e-10);
  if (d == 3)
    return 2.0 * quad::finite(
                     [&](double p1) {
                       if (p1 >= 1.0) return 0.0;
                       return quad::finite(
                           [&](double p2) {
                             return g(eig[0] * p1 + eig[1] * p2 +
                                      eig[2] * (1.0 - p1 - p2));
                           },
                           0.0, 1.0 - p1, 1e-11);
                     },
                     0.0, 1.0, 1e-10);
  throw Error(errc::invalid_config, "direction average supports d <= 3");
}

MatrixEnsemble::MatrixEnsemble(int d, LevyTriplet mu, EnsembleOptions opt)
    : d_(d), mu_(std::move(mu)), opt_(opt) {
  if (d_ < 1) throw Error(errc::invalid_config, "dimension must be positive");
  if (!(opt_.eps > 0.0) || opt_.eps > 1.0)
    throw Error(errc::invalid_config, "jump cutoff must lie in (0, 1]");
  drift_eff_ = mu_.gamma - mu_.nu.truncated_mean_above(opt_.eps);
  double a_eff = mu_.a;
  if (opt_.ar_substitute && !mu_.nu.is_zero()) a_eff += mu_.nu.x2_below(opt_.eps);
  sigma2_entry_ = a_eff / (d_ + 1.0);
  if (!mu_.nu.is_zero()) {
    double mass = mu_.nu.mass_above(opt_.eps);
    if (mass > 0.0) {
      rate_ = d_ * mass;
      sampler_ = mu_.nu.sampler_above(opt_.eps);
    }
  }
}

MatrixSample MatrixEnsemble::sample(Rng& rng, double horizon) const {
  if (!(horizon > 0.0)) throw Error(errc::invalid_config, "horizon must be positive");
  MatrixSample out;
  out.drift = drift_eff_ * horizon;
  const double s2 = sigma2_entry_ * horizon;
  out.gaussian = s2 > 0.0 ? gaussian_hermitian(d_, s2, rng) : Mat::Zero(d_, d_);
  Mat m = out.gaussian;
  m.diagonal().array() += out.drift;
  if (rate_ > 0.0) {
    const double mean = rate_ * horizon;
    if (mean > opt_.jump_cap)
      throw Error(errc::jump_cap_exceeded,
                  "expected jump count " + std::to_string(mean) +
                      " exceeds the configured cap");
    const long long n = std::poisson_distribution<long long>(mean)(rng);
    std::uniform_real_distribution<double> unif(0.0, horizon);
    for (long long j = 0; j < n; ++j) {
      const double x = (*sampler_)(rng);
      const Vec u = random_unit_vector(d_, rng);
      const double t = unif(rng);
      m.selfadjointView<Eigen::Lower>().rankUpdate(u, x);
      if (opt_.keep_jumps) out.jumps.push_back({t, x, u});
    }
  }
  out.m = m.selfadjointView<Eigen::Lower>();
  return out;
}

std::complex<double> MatrixEnsemble::predicted_cf(const std::vector<double>& eig,
                                                  double z) const {
  if (static_cast<int>(eig.size()) != d_)
    throw Error(errc::invalid_config, "eigenvalue list does not match dimension");
  double R = 0.0;
  for (double e : eig) R = std::max(R, std::abs(e));
  R = std::max(R * std::abs(z), 1e-8) * 1.05;
  static thread_local std::unordered_map<const MatrixEnsemble*,
                                         std::shared_ptr<const ExponentTable>>
      tables;
  auto& slot = tables[this];
  if (!slot || slot->radius < R) slot = build_table(mu_, R);
  const ExponentTable& t = *slot;
  double re = direction_average(eig, [&](double s) { return t.re(z * s); });
  double im = direction_average(eig, [&](double s) { return t.im(z * s); });
  return std::exp(static_cast<double>(d_) * cplx(re, im));
}

double dirichlet_first_band(int d, double t1, double t2) {
  auto upper = [d](double t) {
    return std::pow(std::clamp(1.0 - t, 0.0, 1.0), d - 1.0);
  };
  return upper(t1) - upper(t2);
}

double dirichlet_first_dominates(int d, double beta) {
  if (beta <= 0.0) return 1.0;
  if (d == 1) return 1.0;
  if (d == 2) return 1.0 / (1.0 + beta);
  const double c = (d - 1.0) * (d - 2.0);
  return quad::finite(
      [&](double p1) {
        double hi = std::min(1.0 - p1, p1 / beta);
        if (hi <= 0.0) return 0.0;
        return quad::finite(
            [&](double p2) { return c * std::pow(1.0 - p1 - p2, d - 3.0); },
            0.0, hi, 1e-12);
      },
      0.0, 1.0, 1e-11);
}

std::vector<PolarSetCheck> polar_form_check(const LevyTriplet& mu, int d,
                                            double band_lo, double band_hi,
                                            double horizon, Rng& rng) {
  if (!(0.0 < band_lo && band_lo < band_hi))
    throw Error(errc::invalid_config, "radial band must satisfy 0 < lo < hi");
  if (mu.nu.is_zero())
    throw Error(errc::degenerate_set, "occupancy check needs a jump measure");
  const double eps0 = std::min(band_lo / 2.0, 1.0);
  const double total = mu.nu.mass_above(eps0);
  if (total <= 0.0)
    throw Error(errc::degenerate_set, "no jump mass above the band cutoff");

  const double m_pos = d * mu.nu.radial_mass(+1, band_lo, band_hi);
  const double m_neg = d * mu.nu.radial_mass(-1, band_lo, band_hi);
  const double p_band = dirichlet_first_band(d, 0.2, 0.6);
  const double p_dom = dirichlet_first_dominates(d, 0.5);
  if (horizon <= 0.0) {
    // Aim for ~2500 counts in the thinnest positive-rate event.
    double thin = kInf;
    for (double r : {m_pos, m_neg, m_pos * p_band, m_pos * p_dom,
                     m_pos * (1.0 - p_dom)})
      if (r > 0.0) thin = std::min(thin, r);
    if (!std::isfinite(thin))
      throw Error(errc::degenerate_set, "no set has positive rate");
    horizon = 2500.0 / thin;
  }

  std::vector<PolarSetCheck> sets(6);
  sets[0].name = "positive jumps, norm band";
  sets[0].expected = m_pos;
  sets[1].name = "negative jumps, norm band";
  sets[1].expected = m_neg;
  sets[2].name = "either sign, norm band";
  sets[2].expected = m_pos + m_neg;
  sets[3].name = "positive jumps, leading weight in (0.2,0.6)";
  sets[3].expected = m_pos * p_band;
  sets[4].name = "positive jumps, positive probe trace";
  sets[4].expected = m_pos * p_dom;
  sets[5].name = "positive jumps, negative probe trace";
  sets[5].expected = m_pos * (1.0 - p_dom);

  const JumpSampler sampler = mu.nu.sampler_above(eps0);
  const double mean = d * total * horizon;
  if (mean > 5e7)
    throw Error(errc::jump_cap_exceeded, "occupancy horizon draws too many jumps");
  const long long n = std::poisson_distribution<long long>(mean)(rng);
  for (long long j = 0; j < n; ++j) {
    const double x = sampler(rng);
    const Vec u = random_unit_vector(d, rng);
    const double ax = std::abs(x);
    if (!(ax > band_lo && ax <= band_hi)) continue;
    const double p1 = std::norm(u[0]);
    const double p2 = d > 1 ? std::norm(u[1]) : 0.0;
    const double probe = p1 - 0.5 * p2;  // <u, diag(1,-1/2,0,..) u>
    if (x > 0.0) {
      sets[0].observed += 1.0;
      if (p1 > 0.2 && p1 <= 0.6) sets[3].observed += 1.0;
      if (probe > 0.0)
        sets[4].observed += 1.0;
      else
        sets[5].observed += 1.0;
    } else {
      sets[1].observed += 1.0;
    }
    sets[2].observed += 1.0;
  }
  for (auto& s : sets) {
    const double lam = s.expected * horizon;
    if (lam <= 0.0)
      s.zscore = s.observed > 0.0 ? kInf : 0.0;
    else
      s.zscore = (s.observed - lam) / std::sqrt(lam);
  }
  return sets;
}

}  // namespace fid
