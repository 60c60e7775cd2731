#include "fid/integrated_law.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "fid/util/error.hpp"
#include "fid/util/quad.hpp"
#include "fid/util/special.hpp"

namespace fid {
namespace {

using cplx = std::complex<double>;

// int_a^b w(r) rho(r) dr over a clipped density block, splitting at the
// block's own breakpoints plus caller-supplied ones.
double dens_quad(const RadialDensity& d, double a, double b,
                 const std::function<double(double)>& w,
                 std::vector<double> extra, double tol = 1e-11) {
  a = std::max(a, d.lo);
  b = std::min(b, d.hi);
  if (!(a < b)) return 0.0;
  // A weight that underflowed to zero must not touch the density, which can
  // overflow at the same argument.
  auto f = [&](double r) {
    double wv = w(r);
    return wv == 0.0 ? 0.0 : wv * d.density(r);
  };
  std::vector<double> bp;
  for (double p : d.breakpoints) bp.push_back(p);
  for (double p : extra) bp.push_back(p);
  std::vector<double> inner;
  for (double p : bp)
    if (p > a && p < b) inner.push_back(p);
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  if (b == kInf) {
    double split = std::max(2.0 * a, 2.0);
    for (double p : inner) split = std::max(split, 2.0 * p);
    return quad::finite_split(f, a, split, inner, tol) +
           quad::upper_tail(f, split, tol);
  }
  return quad::finite_split(f, a, b, inner, tol);
}

// int_a^b f split at interior breakpoints; b may be infinite.
double range_quad(const std::function<double(double)>& f, double a, double b,
                  std::vector<double> bps, double tol = 1e-11) {
  if (!(a < b)) return 0.0;
  std::vector<double> inner;
  for (double p : bps)
    if (p > a && p < b && std::isfinite(p)) inner.push_back(p);
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  if (b == kInf) {
    double split = std::max(2.0 * a, 2.0);
    for (double p : inner) split = std::max(split, 2.0 * p);
    return quad::finite_split(f, a, split, inner, tol) +
           quad::upper_tail(f, split, tol);
  }
  return quad::finite_split(f, a, b, inner, tol);
}

// int f(w) |d time_above(w)| over (0, h_max): the occupation-time measure of
// a monotone kernel in level space.
double occupation_integral(const Kernel& h, const std::function<double(double)>& f,
                           const std::vector<double>& extra_kinks, double tol) {
  auto g = [&](double w) { return f(w) * h.time_above_deriv(w); };
  std::vector<double> kinks = h.level_kinks();
  kinks.insert(kinks.end(), extra_kinks.begin(), extra_kinks.end());
  const double hmax = h.h_max();
  std::vector<double> inner;
  if (std::isfinite(hmax)) {
    for (double k : kinks)
      if (k > 0.0 && k < hmax) inner.push_back(k);
    std::sort(inner.begin(), inner.end());
    inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
    return quad::finite_split(g, 0.0, hmax, inner, tol);
  }
  double split = 1.0;
  for (double k : kinks)
    if (std::isfinite(k)) split = std::max(split, k);
  split *= 2.0;
  for (double k : kinks)
    if (k > 0.0 && k < split) inner.push_back(k);
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  return quad::finite_split(g, 0.0, split, inner, tol) +
         quad::upper_tail(g, split, tol);
}

// D(w) = int x (1_{|wx|<=1} - 1_{|x|<=1}) nu(dx): the drift correction from
// re-truncating jumps scaled by w.
double truncation_shift(const LevyMeasure& nu, double w) {
  if (nu.is_zero() || w <= 0.0) return 0.0;
  // The re-truncation window [1, 1/w] collapses as w -> 1; below rounding
  // width its contribution is zero to double precision.
  if (std::fabs(w - 1.0) <= 4e-13) return 0.0;
  const double b = 1.0 / w;
  const double lo = std::min(1.0, b);
  const double hi = std::max(1.0, b);
  double s = 0.0;
  for (int sign : {-1, +1}) {
    // Geometric panels keep huge upper radii cheap when the tail decays.
    double acc = 0.0, a0 = lo, a1 = std::min(hi, std::max(2.0 * lo, 2.0));
    double prev = kInf;
    for (int i = 0; i < 1200 && a0 < hi; ++i) {
      double p = nu.radial_x_integral(sign, a0, a1);
      acc += p;
      if (a1 >= hi) break;
      double ap = std::abs(p);
      if (ap <= prev && ap < 1e-18 + 1e-15 * std::abs(acc)) break;
      prev = ap;
      a0 = a1;
      a1 = std::min(hi, 2.0 * a1);
    }
    s += acc;
  }
  return w < 1.0 ? s : -s;
}

// Memoizes the driver exponent across the two real quadrature passes, which
// visit identical abscissas.
std::function<cplx(double)> cached_cumulant(const LevyTriplet& mu, double z) {
  auto cache = std::make_shared<std::unordered_map<uint64_t, cplx>>();
  return [cache, mu, z](double w) {
    uint64_t key;
    std::memcpy(&key, &w, sizeof key);
    auto it = cache->find(key);
    if (it != cache->end()) return it->second;
    cplx v = mu.cumulant(w * z);
    cache->emplace(key, v);
    return v;
  };
}

// Smallest level with positive occupation density (positive for kernels that
// never dip below a floor on their support).
double level_floor(const Kernel& h) {
  if (h.time_above_deriv(1e-8) != 0.0 || h.level_kinks().empty()) return 0.0;
  double w = kInf;
  for (double k : h.level_kinks()) w = std::min(w, k);
  return std::isfinite(w) ? w : 0.0;
}

double side_min_radius(const RadialSide& s) {
  double m = kInf;
  for (const Atom& a : s.atoms) m = std::min(m, a.r);
  if (s.dens) m = std::min(m, s.dens->lo);
  return m;
}

double side_max_radius(const RadialSide& s) {
  double m = 0.0;
  for (const Atom& a : s.atoms) m = std::max(m, a.r);
  if (s.dens) m = std::max(m, s.dens->hi);
  return m;
}

RadialSide scale_side(const RadialSide& s, double c, double time_mass) {
  RadialSide o;
  o.lambda = time_mass * s.lambda;
  for (const Atom& a : s.atoms) o.atoms.push_back({c * a.r, a.mass});
  if (s.dens) {
    const RadialDensity base = *s.dens;
    RadialDensity d;
    d.kind = ProfileKind::RawDensity;
    d.profile = [base, c](double r) { return base.density(r / c) / c; };
    d.lo = c * base.lo;
    d.hi = std::isfinite(base.hi) ? c * base.hi : kInf;
    d.tail = base.tail;
    d.power_alpha = base.power_alpha;
    d.origin_alpha = base.origin_alpha;
    if (base.analytic)
      d.analytic = [f = base.analytic, c](cplx z) { return f(z / c) / c; };
    if (base.tail_mass)
      d.tail_mass = [f = base.tail_mass, c](double r) { return f(r / c); };
    for (double p : base.breakpoints) d.breakpoints.push_back(c * p);
    o.dens = std::move(d);
  }
  return o;
}

RadialSide pushforward_side(const RadialSide& s, const Kernel& h) {
  RadialSide o;
  if (s.empty()) return o;
  const double hmax = h.h_max();
  const double wmin = level_floor(h);
  const std::vector<double> kinks = h.level_kinks();

  // Both integrals run over the level variable w = r / x, so the kernel's
  // own edge behavior (and the jump density's support edges) sit exactly at
  // quadrature endpoints instead of at cancellation-prone interior images.
  auto level_bp = [kinks](const RadialDensity& dd, double r) {
    std::vector<double> bp;
    for (double k : kinks)
      if (std::isfinite(k)) bp.push_back(k);
    for (double xb : dd.breakpoints)
      if (xb > 0.0) bp.push_back(r / xb);
    return bp;
  };
  auto rho = [s, h, hmax, wmin, level_bp](double r) {
    double acc = 0.0;
    for (const Atom& a : s.atoms)
      acc += a.mass * h.time_above_deriv(r / a.r) / a.r;
    if (s.dens) {
      const RadialDensity& dd = *s.dens;
      double wlo = wmin;
      if (std::isfinite(dd.hi)) wlo = std::max(wlo, r / dd.hi);
      double whi = hmax;
      if (dd.lo > 0.0) whi = std::min(whi, r / dd.lo);
      acc += range_quad(
          [&](double w) {
            double td = h.time_above_deriv(w);
            return td == 0.0 ? 0.0 : td * dd.density(r / w) / w;
          },
          wlo, whi, level_bp(dd, r));
    }
    return s.lambda * acc;
  };
  auto tail = [s, h, hmax, level_bp](double r) {
    double acc = 0.0;
    for (const Atom& a : s.atoms) acc += a.mass * h.time_above(r / a.r);
    if (s.dens) {
      const RadialDensity& dd = *s.dens;
      double wlo = std::isfinite(dd.hi) ? r / dd.hi : 0.0;
      double whi = hmax;
      if (dd.lo > 0.0) whi = std::min(whi, r / dd.lo);
      acc += range_quad(
          [&](double w) {
            double t = h.time_above(w);
            return t == 0.0 ? 0.0 : t * dd.density(r / w) * r / (w * w);
          },
          wlo, whi, level_bp(dd, r));
    }
    return s.lambda * acc;
  };

  RadialDensity d;
  d.kind = ProfileKind::RawDensity;
  d.profile = rho;
  d.tail_mass = tail;
  double rmin = side_min_radius(s);
  double rmax = side_max_radius(s);
  d.lo = wmin > 0.0 && std::isfinite(rmin) ? wmin * rmin : 0.0;
  d.hi = std::isfinite(hmax) && std::isfinite(rmax) ? hmax * rmax : kInf;
  bool power = false;
  double alpha = 0.0;
  if (s.dens && s.dens->tail == TailClass::PowerLaw) {
    power = true;
    alpha = s.dens->power_alpha;
  }
  if (power) {
    d.tail = TailClass::PowerLaw;
    d.power_alpha = alpha;
  } else {
    d.tail = std::isfinite(d.hi) ? TailClass::Bounded : TailClass::Exponential;
  }
  // A pure-power origin survives the level pushforward with the same index.
  if (s.dens && s.dens->origin_alpha >= 0.0 && d.lo == 0.0)
    d.origin_alpha = s.dens->origin_alpha;
  for (const Atom& a : s.atoms) {
    for (double k : kinks)
      if (k > 0.0 && std::isfinite(k)) d.breakpoints.push_back(k * a.r);
    if (std::isfinite(hmax)) d.breakpoints.push_back(hmax * a.r);
    if (wmin > 0.0) d.breakpoints.push_back(wmin * a.r);
  }
  std::sort(d.breakpoints.begin(), d.breakpoints.end());
  d.breakpoints.erase(std::unique(d.breakpoints.begin(), d.breakpoints.end()),
                      d.breakpoints.end());
  o.lambda = 1.0;
  o.dens = std::move(d);
  return o;
}

// int g(x) nu_xi(dx) over one side of the driver.
double side_integral(const RadialSide& s, const std::function<double(double)>& g,
                     double from = 0.0) {
  double acc = 0.0;
  for (const Atom& a : s.atoms)
    if (a.r > from) acc += a.mass * g(a.r);
  if (s.dens) acc += dens_quad(*s.dens, from, kInf, g, {});
  return s.lambda * acc;
}

// Time-space pushforward density: int_0^T rho(x / h(t)) / h(t) dt for a
// driver with a radial density; the reference route for kernels without a
// bespoke closed form.
double time_space_density(const RadialSide& s, const Kernel& h, double x) {
  if (!s.dens)
    throw Error(errc::degenerate_set,
                "time-space reference needs a driver density");
  const RadialDensity d = *s.dens;
  auto f = [&](double t) {
    double w = h(t);
    if (w <= 0.0) return 0.0;
    double den = d.density(x / w);
    return den == 0.0 ? 0.0 : den / w;
  };
  double T = h.support_end();
  // Images of the driver's support edges and kinks become kinks or
  // integrable singularities in time; pin them to panel endpoints.
  std::vector<double> bp;
  const Monotonicity mono = h.monotonicity();
  if (mono == Monotonicity::Increasing || mono == Monotonicity::Decreasing) {
    std::vector<double> xs = d.breakpoints;
    if (std::isfinite(d.hi)) xs.push_back(d.hi);
    if (d.lo > 0.0) xs.push_back(d.lo);
    for (double xb : xs) {
      if (!(xb > 0.0)) continue;
      double tb = h.inverse(x / xb);
      if (tb > 0.0 && std::isfinite(tb) && (!std::isfinite(T) || tb < T))
        bp.push_back(tb);
    }
  }
  double v;
  if (std::isfinite(T)) {
    v = quad::finite_split(f, 0.0, T, bp, 1e-11);
  } else {
    double split = 1.0;
    for (double b : bp) split = std::max(split, 2.0 * b);
    v = quad::finite_split(f, 0.0, split, bp, 1e-11) +
        quad::upper_tail(f, split, 1e-11);
  }
  return s.lambda * v;
}

}  // namespace

std::complex<double> cumulant_of_integral(const LevyTriplet& mu, const Kernel& h,
                                          double z) {
  if (h.needs_ilog()) mu.nu.require_ilog();
  if (z == 0.0) return {0.0, 0.0};
  const Monotonicity mono = h.monotonicity();
  if (mono == Monotonicity::Constant)
    return h.support_end() * mu.cumulant(h.h_max() * z);
  auto C = cached_cumulant(mu, z);
  if (mono == Monotonicity::None) {
    double T = h.support_end();
    if (!std::isfinite(T))
      throw Error(errc::not_monotone,
                  "non-monotone kernels need a finite support");
    double re = quad::finite([&](double t) { return C(h(t)).real(); }, 0.0, T, 1e-9);
    double im = quad::finite([&](double t) { return C(h(t)).imag(); }, 0.0, T, 1e-9);
    return {re, im};
  }
  double re = occupation_integral(h, [&](double w) { return C(w).real(); }, {}, 1e-9);
  double im = occupation_integral(h, [&](double w) { return C(w).imag(); }, {}, 1e-9);
  return {re, im};
}

double integrated_drift(const LevyTriplet& mu, const Kernel& h) {
  if (h.needs_ilog()) mu.nu.require_ilog();
  const Monotonicity mono = h.monotonicity();
  if (mono == Monotonicity::Constant) {
    double T = h.support_end(), c = h.h_max();
    return T * c * (mu.gamma + truncation_shift(mu.nu, c));
  }
  if (mono == Monotonicity::None) {
    double T = h.support_end();
    return quad::finite(
        [&](double t) {
          double w = h(t);
          return w * (mu.gamma + truncation_shift(mu.nu, w));
        },
        0.0, T, 1e-10);
  }
  // Level space; the shift kinks at w = 1 and at w = 1/r for every atom.
  std::vector<double> kinks{1.0};
  for (int sign : {-1, +1})
    for (const Atom& a : mu.nu.side(sign).atoms) kinks.push_back(1.0 / a.r);
  double jump = 0.0;
  if (!mu.nu.is_zero())
    jump = occupation_integral(
        h, [&](double w) { return w * truncation_shift(mu.nu, w); }, kinks, 1e-10);
  return mu.gamma * h.int_h() + jump;
}

LevyMeasure pushforward_measure(const LevyMeasure& nu, const Kernel& h) {
  if (nu.is_zero()) return LevyMeasure::zero();
  if (h.needs_ilog()) nu.require_ilog();
  const Monotonicity mono = h.monotonicity();
  if (mono == Monotonicity::None)
    throw Error(errc::not_monotone,
                "jump-measure pushforward requires a monotone kernel");
  if (mono == Monotonicity::Constant)
    return LevyMeasure::from_sides(scale_side(nu.side(-1), h.h_max(), h.support_end()),
                                   scale_side(nu.side(+1), h.h_max(), h.support_end()));
  return LevyMeasure::from_sides(pushforward_side(nu.side(-1), h),
                                 pushforward_side(nu.side(+1), h));
}

IntegratedLaw integrate_law(const LevyTriplet& mu, const Kernel& h) {
  if (h.needs_ilog()) mu.nu.require_ilog();
  IntegratedLaw out;
  out.triplet.a = mu.a * h.int_h2();
  out.triplet.nu = pushforward_measure(mu.nu, h);
  out.triplet.gamma = integrated_drift(mu, h);
  double T = h.support_end();
  out.horizon = std::isfinite(T) ? T : h.horizon(1e-9, 1.0, 1e-9);
  return out;
}

double radial_profile_reference(const std::string& class_id, const LevyTriplet& mu,
                                const Kernel& h, int sign, double r) {
  const RadialSide& s = mu.nu.side(sign);
  if (r <= 0.0) throw Error(errc::invalid_config, "radius must be positive");
  if (s.empty()) return 0.0;
  if (class_id == "selfdecomposable")
    return mu.nu.radial_mass(sign, r, kInf) / r;
  if (class_id == "thorin")
    return side_integral(s, [&](double x) { return std::exp(-r / x); }) / r;
  if (class_id == "bondesson")
    return side_integral(s, [&](double x) { return std::exp(-r / x) / x; });
  if (class_id == "thorin_alt") {
    // Mixes the driver's k-function over an Exp(1) scale, integrating over
    // the scale variable rather than the jump size.
    if (!s.dens)
      throw Error(errc::degenerate_set, "reference needs a driver density");
    const RadialDensity d = *s.dens;
    double v = quad::upper_tail(
        [&](double u) {
          double y = r / u;
          return y * d.density(y) * std::exp(-u);
        },
        0.0, 1e-11);
    return s.lambda * v / r;
  }
  if (class_id == "jurek")
    return side_integral(s, [](double x) { return 1.0 / x; }, r);
  if (class_id == "type_g")
    return side_integral(s, [&](double x) { return normal_pdf(r / x) / x; });
  if (class_id == "m_class")
    return side_integral(s, [&](double x) { return normal_pdf(r / x); }) / r;
  if (class_id == "a_class") {
    // Integrate in the edge variable u = x - r so the inverse-sqrt edge
    // sits at a quadrature endpoint, evaluated without cancellation.
    constexpr double two_over_pi = 2.0 / std::numbers::pi;
    double acc = 0.0;
    for (const Atom& at : s.atoms)
      if (at.r > r)
        acc += at.mass * two_over_pi / std::sqrt((at.r - r) * (at.r + r));
    if (s.dens) {
      const RadialDensity d = *s.dens;
      auto f = [&](double u) {
        double den = d.density(r + u);
        return den == 0.0 ? 0.0
                          : two_over_pi * den / std::sqrt(u * (u + 2.0 * r));
      };
      double top = std::isfinite(d.hi) ? d.hi - r : kInf;
      if (top > 0.0) {
        std::vector<double> bp;
        for (double xb : d.breakpoints)
          if (xb > r) bp.push_back(xb - r);
        acc += range_quad(f, 0.0, top, std::move(bp));
      }
    }
    return s.lambda * acc;
  }
  if (class_id == "ggc" || class_id == "type_g_alt" || class_id == "gen_type_g")
    return time_space_density(s, h, r);
  throw Error(errc::unknown_name, "no radial reference for class " + class_id);
}

}  // namespace fid
