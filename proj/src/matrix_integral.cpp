#include "fid/matrix_integral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fid/spectra.hpp"
#include "fid/util/error.hpp"

namespace fid {
namespace {

// Radius below which all but a 1e-10 fraction of the truncated jump mass
// lives; sets the scale for the largest jumps the horizon must resolve.
double jump_scale(const LevyMeasure& nu, double eps) {
  const double base = nu.mass_above(eps);
  if (base <= 0.0) return 1.0;
  const double hi = nu.max_abs_support();
  if (std::isfinite(hi)) return std::max(1.0, hi);
  double r = 1.0;
  for (int i = 0; i < 80; ++i) {
    if (nu.mass_above(r) <= 1e-10 * base) return r;
    r *= 2.0;
  }
  return r;
}

}  // namespace

PathIntegralSimulator::PathIntegralSimulator(int d, LevyTriplet mu, Kernel h,
                                             IntegralOptions opt)
    : d_(d), mu_(std::move(mu)), h_(std::move(h)), opt_(opt) {
  if (d_ < 1) throw Error(errc::invalid_config, "dimension must be positive");
  if (!(opt_.eps > 0.0) || opt_.eps > 1.0)
    throw Error(errc::invalid_config, "jump cutoff must lie in (0, 1]");
  if (h_.needs_ilog()) mu_.nu.require_ilog();
  if (opt_.horizon > 0.0) {
    T_ = opt_.horizon;
  } else {
    const double end = h_.support_end();
    T_ = std::isfinite(end)
             ? end
             : h_.horizon(opt_.horizon_tol, jump_scale(mu_.nu, opt_.eps), opt_.eps);
  }
  if (!(T_ > 0.0) || !std::isfinite(T_))
    throw Error(errc::invalid_config, "integration horizon must be finite");
  double mass = mu_.nu.is_zero() ? 0.0 : mu_.nu.mass_above(opt_.eps);
  if (mass > 0.0) {
    rate_ = d_ * mass;
    sampler_ = mu_.nu.sampler_above(opt_.eps);
  }
  const double drift_eff = mu_.gamma - mu_.nu.truncated_mean_above(opt_.eps);
  drift_term_ = drift_eff * h_.int_h_upto(T_);
  double a_eff = mu_.a;
  if (opt_.ar_substitute && !mu_.nu.is_zero()) a_eff += mu_.nu.x2_below(opt_.eps);
  sigma2_entry_ = a_eff * h_.int_h2_upto(T_) / (d_ + 1.0);
}

IntegralSample PathIntegralSimulator::sample(Rng& rng) const {
  IntegralSample out;
  out.horizon = T_;
  Mat m = sigma2_entry_ > 0.0 ? gaussian_hermitian(d_, sigma2_entry_, rng)
                              : Mat::Zero(d_, d_);
  m.diagonal().array() += drift_term_;
  if (rate_ > 0.0) {
    const double mean = rate_ * T_;
    if (mean > opt_.jump_cap)
      throw Error(errc::jump_cap_exceeded,
                  "expected jump count " + std::to_string(mean) +
                      " exceeds the configured cap");
    const long long n = std::poisson_distribution<long long>(mean)(rng);
    std::uniform_real_distribution<double> unif(0.0, T_);
    for (long long j = 0; j < n; ++j) {
      const double t = unif(rng);
      const double x = (*sampler_)(rng);
      const Vec u = random_unit_vector(d_, rng);
      const double w = h_(t) * x;
      if (w != 0.0) m.selfadjointView<Eigen::Lower>().rankUpdate(u, w);
      if (opt_.keep_jumps) out.jumps.push_back({t, x, u});
    }
  }
  out.m = m.selfadjointView<Eigen::Lower>();
  return out;
}

MatrixEnsemble integrated_ensemble(int d, const LevyTriplet& mu, const Kernel& h,
                                   EnsembleOptions opt) {
  return MatrixEnsemble(d, integrate_law(mu, h).triplet, opt);
}

EquivalenceReport pathway_equivalence(const LevyTriplet& mu, const Kernel& h, int d,
                                      int replicas_a, int replicas_b,
                                      const IntegralOptions& opt_a,
                                      const EnsembleOptions& opt_b, Rng& rng) {
  if (replicas_a < 2 || replicas_b < 2)
    throw Error(errc::invalid_config, "need at least two replicas per pathway");
  PathIntegralSimulator sim(d, mu, h, opt_a);
  MatrixEnsemble ens = integrated_ensemble(d, mu, h, opt_b);

  std::vector<std::vector<double>> spectra;
  spectra.reserve(replicas_a + replicas_b);
  for (int i = 0; i < replicas_a; ++i)
    spectra.push_back(hermitian_eigenvalues(sim.sample(rng).m));
  for (int i = 0; i < replicas_b; ++i)
    spectra.push_back(hermitian_eigenvalues(ens.sample(rng).m));

  const int total = replicas_a + replicas_b;
  auto pooled_ks = [&](const std::vector<int>& label_of) {
    std::vector<double> a, b;
    for (int i = 0; i < total; ++i) {
      auto& dst = label_of[i] == 0 ? a : b;
      dst.insert(dst.end(), spectra[i].begin(), spectra[i].end());
    }
    return ks_two_sample(EmpiricalCdf(std::move(a)), EmpiricalCdf(std::move(b)));
  };

  std::vector<int> labels(total, 1);
  std::fill(labels.begin(), labels.begin() + replicas_a, 0);
  EquivalenceReport rep;
  rep.ks = pooled_ks(labels);
  rep.permutations = 400;
  int at_least = 0;
  std::vector<int> perm = labels;
  for (int k = 0; k < rep.permutations; ++k) {
    std::shuffle(perm.begin(), perm.end(), rng);
    if (pooled_ks(perm) >= rep.ks - 1e-15) ++at_least;
  }
  rep.p_value = (1.0 + at_least) / (rep.permutations + 1.0);
  rep.reject = rep.p_value <= 0.01;
  return rep;
}

}  // namespace fid
