#include "fid/levy_measure.hpp"

#include <algorithm>
#include <cmath>

#include "fid/util/error.hpp"
#include "fid/util/quad.hpp"

namespace fid {

namespace {

using cplx = std::complex<double>;

std::vector<double> clip_breakpoints(const RadialDensity& d, double a, double b) {
  std::vector<double> out;
  for (double p : d.breakpoints)
    if (p > a && p < b) out.push_back(p);
  return out;
}

// int_a^b w(r) rho(r) dr over the clipped density support.
double dens_integral(const RadialDensity& d, double a, double b,
                     const std::function<double(double)>& w, double tol = 1e-10) {
  a = std::max(a, d.lo);
  b = std::min(b, d.hi);
  if (!(a < b)) return 0.0;
  auto f = [&](double r) { return w(r) * d.density(r); };
  if (b == kInf)
    return quad::upper_tail(f, a, tol);
  return quad::finite_split(f, a, b, clip_breakpoints(d, a, b), tol);
}

cplx dens_integral_c(const RadialDensity& d, double a, double b,
                     const std::function<cplx(double)>& w, double tol = 1e-10) {
  double re = dens_integral(d, a, b, [&](double r) { return w(r).real(); }, tol);
  double im = dens_integral(d, a, b, [&](double r) { return w(r).imag(); }, tol);
  return {re, im};
}

// Width of the band where a declared origin power is exact.
constexpr double kOriginBand = 1e-6;

bool declared_origin(const RadialDensity& d) {
  return d.origin_alpha >= 0.0 && d.lo == 0.0;
}

// int_(0,b] q(r) r^2 rho(r) dr when the origin power is declared and q is
// bounded near 0.  Substituting u = r^p with p = 2 - alpha makes the weight
// r^2 rho dr/du a constant inside the power band, so the integrand stays
// bounded down to u = 0; rho itself is never evaluated where it overflows.
double origin_m2_integral(const RadialDensity& d, double b,
                          const std::function<double(double)>& q,
                          double tol = 1e-10) {
  double alpha = d.origin_alpha;
  if (alpha >= 2.0)
    throw Error(errc::divergent_integral, "origin exponent has infinite variance");
  b = std::min(b, d.hi);
  if (!(b > 0.0)) return 0.0;
  double p = 2.0 - alpha;
  double band = std::min(kOriginBand, b);
  double coef = d.density(band) * std::pow(band, 1.0 + alpha);
  auto g = [&](double u) {
    double r = std::pow(u, 1.0 / p);
    double w = r <= band ? coef : d.density(r) * std::pow(r, 3.0 - p);
    return q(r) * w / p;
  };
  std::vector<double> bps;
  if (band < b) bps.push_back(std::pow(band, p));
  for (double bp : clip_breakpoints(d, 0.0, b)) bps.push_back(std::pow(bp, p));
  return quad::finite_split(g, 0.0, std::pow(b, p), bps, tol);
}

cplx origin_m2_integral_c(const RadialDensity& d, double b,
                          const std::function<cplx(double)>& q,
                          double tol = 1e-10) {
  double re = origin_m2_integral(d, b, [&](double r) { return q(r).real(); }, tol);
  double im = origin_m2_integral(d, b, [&](double r) { return q(r).imag(); }, tol);
  return {re, im};
}

// nu_xi((r, inf)) for one density block, lambda not applied.
double dens_tail(const RadialDensity& d, double r) {
  double a = std::max(r, d.lo);
  if (a >= d.hi) return 0.0;
  if (d.tail_mass) return d.tail_mass(a);
  return dens_integral(d, a, d.hi, [](double) { return 1.0; });
}

// int_a^hi e^{iwr} rho(r) dr for w real.
cplx osc_tail(const RadialDensity& d, double a, double w) {
  if (a >= d.hi) return 0.0;
  if (d.hi < kInf)
    return dens_integral_c(d, a, d.hi,
                           [&](double r) { return std::polar(1.0, w * r); });
  if (w < 0.0) return std::conj(osc_tail(d, a, -w));
  // A power-type continuation decays monotonically up the vertical contour,
  // so rotating there removes the oscillation outright.  Exponential-type
  // densities would reintroduce it as e^{-i beta t}, which stops converging
  // as w -> 0; they go through the windowed panels below instead, where a
  // finite window keeps the phase resolvable regardless of the decay rate.
  if (d.analytic && d.tail == TailClass::PowerLaw) {
    cplx inner = quad::upper_tail_c(
        [&](double t) { return std::exp(-w * t) * d.analytic(cplx(a, t)); }, 0.0);
    return cplx(0.0, 1.0) * std::polar(1.0, w * a) * inner;
  }
  // Doubling panels, stop once the remaining mass bound is negligible.
  cplx total = 0.0;
  double lo = a;
  double hi = std::max(2.0 * a, 2.0);
  for (int i = 0; i < 60; ++i) {
    total += dens_integral_c(d, lo, hi,
                             [&](double r) { return std::polar(1.0, w * r); });
    double rem = dens_tail(d, hi);
    if (rem < 5e-12) return total;
    lo = hi;
    hi *= 2.0;
  }
  throw Error(errc::quadrature_nonconvergence,
              "oscillatory tail integral did not stabilize");
}

}  // namespace

double RadialDensity::density(double r) const {
  if (r < lo || r > hi) return 0.0;
  switch (kind) {
    case ProfileKind::KFunction:
      return profile(r) / r;
    case ProfileKind::GFunction:
      return profile(r * r);
    case ProfileKind::LFunction:
    case ProfileKind::RawDensity:
      return profile(r);
  }
  return 0.0;
}

LevyMeasure LevyMeasure::from_atoms(const std::vector<std::pair<double, double>>& atoms) {
  RadialSide neg, pos;
  for (auto [x, m] : atoms) {
    if (x == 0.0 || !(m > 0.0))
      throw Error(errc::invalid_config, "atoms need x != 0 and mass > 0");
    (x > 0 ? pos : neg).atoms.push_back({std::fabs(x), m});
  }
  return from_sides(std::move(neg), std::move(pos));
}

LevyMeasure LevyMeasure::from_sides(RadialSide neg, RadialSide pos) {
  LevyMeasure out;
  out.sides_[0] = std::move(neg);
  out.sides_[1] = std::move(pos);
  for (auto& s : out.sides_) {
    if (s.lambda < 0.0) throw Error(errc::invalid_config, "negative polar weight");
    if (s.lambda == 0.0) s = RadialSide{};
    std::sort(s.atoms.begin(), s.atoms.end(),
              [](const Atom& a, const Atom& b) { return a.r < b.r; });
    for (const Atom& a : s.atoms)
      if (!(a.r > 0.0) || !(a.mass > 0.0))
        throw Error(errc::invalid_config, "radial atoms need r > 0 and mass > 0");
    if (s.dens) {
      if (!s.dens->profile) throw Error(errc::invalid_config, "density without profile");
      if (!(s.dens->lo >= 0.0) || !(s.dens->lo < s.dens->hi))
        throw Error(errc::invalid_config, "bad density support");
    }
  }
  return out;
}

double LevyMeasure::density_at(double x) const {
  if (x == 0.0) return 0.0;
  const RadialSide& s = side(x > 0 ? 1 : -1);
  if (!s.dens) return 0.0;
  return s.lambda * s.dens->density(std::fabs(x));
}

double LevyMeasure::mass_above(double eps) const {
  double total = 0.0;
  for (const auto& s : sides_) {
    if (s.empty()) continue;
    double part = 0.0;
    for (const Atom& a : s.atoms)
      if (a.r > eps) part += a.mass;
    if (s.dens) part += dens_tail(*s.dens, eps);
    total += s.lambda * part;
  }
  return total;
}

double LevyMeasure::radial_mass(int sign, double a, double b) const {
  const RadialSide& s = side(sign);
  if (s.empty() || !(a < b)) return 0.0;
  double part = 0.0;
  for (const Atom& at : s.atoms)
    if (at.r > a && at.r <= b) part += at.mass;
  if (s.dens) {
    if (s.dens->tail_mass && b >= s.dens->lo)
      part += dens_tail(*s.dens, a) - dens_tail(*s.dens, b);
    else
      part += dens_integral(*s.dens, a, b, [](double) { return 1.0; });
  }
  return s.lambda * part;
}

double LevyMeasure::radial_x_integral(int sign, double a, double b) const {
  const RadialSide& s = side(sign);
  if (s.empty() || !(a < b)) return 0.0;
  double part = 0.0;
  for (const Atom& at : s.atoms)
    if (at.r > a && at.r <= b) part += at.r * at.mass;
  if (s.dens) part += dens_integral(*s.dens, a, b, [](double r) { return r; });
  double x = s.lambda * part;
  return sign > 0 ? x : -x;
}

double LevyMeasure::truncated_mean_above(double eps) const {
  return radial_x_integral(-1, eps, 1.0) + radial_x_integral(+1, eps, 1.0);
}

double LevyMeasure::x2_below(double eps) const {
  double total = 0.0;
  for (int sign : {-1, +1}) {
    const RadialSide& s = side(sign);
    if (s.empty()) continue;
    double part = 0.0;
    for (const Atom& at : s.atoms)
      if (at.r <= eps) part += at.r * at.r * at.mass;
    if (s.dens) {
      const RadialDensity& d = *s.dens;
      if (declared_origin(d))
        part += origin_m2_integral(d, eps, [](double) { return 1.0; });
      else
        part += dens_integral(d, 0.0, eps, [](double r) { return r * r; });
    }
    total += s.lambda * part;
  }
  return total;
}

std::complex<double> LevyMeasure::lk_integral(double z) const {
  if (z == 0.0) return 0.0;
  cplx total = 0.0;
  for (int idx : {0, 1}) {
    const RadialSide& s = sides_[idx];
    if (s.empty()) continue;
    double sign = idx == 0 ? -1.0 : 1.0;
    double w = z * sign;
    cplx part = 0.0;
    for (const Atom& at : s.atoms) {
      cplx e = std::polar(1.0, w * at.r) - 1.0;
      if (at.r <= 1.0) e -= cplx(0.0, w * at.r);
      part += at.mass * e;
    }
    if (s.dens) {
      const RadialDensity& d = *s.dens;
      // Truncated region (lo, min(1, hi)]: the integrand is O(r^2) rho near
      // 0, so for declared origin powers integrate (e^{iwr}-1-iwr)/r^2
      // against the r^2-weighted density; the quotient needs a series once
      // the cancellation bites.
      if (declared_origin(d)) {
        part += origin_m2_integral_c(d, 1.0, [&](double r) -> cplx {
          double x = w * r;
          if (std::fabs(x) < 1e-3)
            return w * w *
                   cplx(-0.5 + x * x / 24.0, x * (-1.0 / 6.0 + x * x / 120.0));
          return (std::polar(1.0, x) - 1.0 - cplx(0.0, x)) / (r * r);
        });
      } else {
        part += dens_integral_c(d, 0.0, 1.0, [&](double r) {
          return std::polar(1.0, w * r) - 1.0 - cplx(0.0, w * r);
        });
      }
      if (d.hi > 1.0) {
        double a = std::max(1.0, d.lo);
        part += osc_tail(d, a, w) - dens_tail(d, a);
      }
    }
    total += s.lambda * part;
  }
  return total;
}

std::complex<double> LevyMeasure::free_lk_integral(std::complex<double> z) const {
  if (z == 0.0) return 0.0;
  bool z_real = std::fabs(z.imag()) < 1e-14;
  cplx total = 0.0;
  for (int idx : {0, 1}) {
    const RadialSide& s = sides_[idx];
    if (s.empty()) continue;
    double sign = idx == 0 ? -1.0 : 1.0;
    cplx w = z * sign;  // term argument: x z = (sign r) z = r w
    if (z_real && w.real() > 0.0) {
      double pole = 1.0 / w.real();
      for (const Atom& at : s.atoms)
        if (std::fabs(at.r - pole) < 1e-12 * pole)
          throw Error(errc::divergent_integral, "free cumulant pole at an atom");
      if (s.dens && pole >= s.dens->lo && pole <= s.dens->hi)
        throw Error(errc::divergent_integral,
                    "free cumulant pole inside the density support");
    }
    cplx part = 0.0;
    for (const Atom& at : s.atoms) {
      cplx e = 1.0 / (1.0 - at.r * w) - 1.0;
      if (at.r <= 1.0) e -= at.r * w;
      part += at.mass * e;
    }
    if (s.dens) {
      const RadialDensity& d = *s.dens;
      // (1 - rw)^{-1} - 1 - rw = r^2 w^2 / (1 - rw) exactly, so the
      // r^2-weighted form needs no series fallback.
      if (declared_origin(d)) {
        part += origin_m2_integral_c(
            d, 1.0, [&](double r) -> cplx { return w * w / (1.0 - r * w); });
      } else {
        part += dens_integral_c(d, 0.0, 1.0, [&](double r) {
          return 1.0 / (1.0 - r * w) - 1.0 - r * w;
        });
      }
      if (d.hi > 1.0) {
        double a = std::max(1.0, d.lo);
        auto f = [&](double r) { return 1.0 / (1.0 - r * w) - 1.0; };
        if (d.hi < kInf)
          part += dens_integral_c(d, a, d.hi, f);
        else {
          double re = quad::upper_tail(
              [&](double r) { return f(r).real() * d.density(r); }, a);
          double im = quad::upper_tail(
              [&](double r) { return f(r).imag() * d.density(r); }, a);
          part += cplx(re, im);
        }
      }
    }
    total += s.lambda * part;
  }
  return total;
}

std::optional<double> LevyMeasure::ilog_integral() const {
  double total = 0.0;
  for (const auto& s : sides_) {
    if (s.empty()) continue;
    double part = 0.0;
    for (const Atom& at : s.atoms)
      if (at.r > 2.0) part += std::log(at.r) * at.mass;
    if (s.dens && s.dens->hi > 2.0) {
      const RadialDensity& d = *s.dens;
      bool converged = false;
      double lo = 2.0;
      for (int k = 0; k <= 40; ++k) {
        double hi = lo * 2.0;
        double inc = dens_integral(d, lo, std::min(hi, d.hi),
                                   [](double r) { return std::log(r); });
        part += inc;
        if (hi >= d.hi || inc < 1e-6) {
          converged = true;
          break;
        }
        lo = hi;
      }
      if (!converged) return std::nullopt;
    }
    total += s.lambda * part;
  }
  return total;
}

void LevyMeasure::require_ilog() const {
  if (!ilog_integral().has_value())
    throw Error(errc::ilog_violation, "log-tail integral diverges for this measure");
}

double LevyMeasure::min_abs_support() const {
  double m = kInf;
  for (const auto& s : sides_) {
    if (s.empty()) continue;
    for (const Atom& at : s.atoms) m = std::min(m, at.r);
    if (s.dens) m = std::min(m, s.dens->lo);
  }
  return m;
}

double LevyMeasure::max_abs_support() const {
  double m = 0.0;
  for (const auto& s : sides_) {
    if (s.empty()) continue;
    for (const Atom& at : s.atoms) m = std::max(m, at.r);
    if (s.dens) m = std::max(m, s.dens->hi);
  }
  return m;
}

PolarDecomposition LevyMeasure::polar_decompose() const {
  if (is_zero())
    throw Error(errc::zero_measure, "polar decomposition of the zero measure");
  PolarDecomposition p;
  for (int idx : {0, 1}) {
    p.lambda[idx] = sides_[idx].empty() ? 0.0 : sides_[idx].lambda;
    p.radial[idx] = &sides_[idx];
  }
  return p;
}

JumpSampler LevyMeasure::sampler_above(double eps) const {
  if (eps < 0.0) throw Error(errc::invalid_config, "negative truncation level");
  JumpSampler out;
  for (int idx : {0, 1}) {
    const RadialSide& s = sides_[idx];
    if (s.empty()) continue;
    int sign = idx == 0 ? -1 : +1;

    JumpSampler::Part ap;
    ap.sign = sign;
    ap.atomic = true;
    for (const Atom& at : s.atoms) {
      if (at.r <= eps) continue;
      ap.mass += s.lambda * at.mass;
      ap.atom_cum.push_back(ap.mass);
      ap.atom_r.push_back(at.r);
    }
    if (ap.mass > 0.0) out.parts_.push_back(std::move(ap));

    if (s.dens) {
      const RadialDensity& d = *s.dens;
      double a = std::max(eps, d.lo);
      if (a < d.hi) {
        double side_mass = s.lambda * dens_tail(d, a);
        if (side_mass > 1e-300) {
          // Truncate an infinite tail where the remaining relative mass is
          // below 1e-12, found by doubling.
          double hi = d.hi;
          if (hi == kInf) {
            hi = std::max(2.0 * std::max(a, 1e-6), 1.0);
            for (int i = 0; i < 80 && s.lambda * dens_tail(d, hi) >
                                          1e-12 * side_mass; ++i)
              hi *= 2.0;
          }
          double lo_knot = a > 0.0 ? a : hi * 1e-9;
          constexpr int kKnots = 4096;
          std::vector<double> r(kKnots), cum(kKnots);
          double ratio = std::log(hi / lo_knot) / (kKnots - 1);
          for (int i = 0; i < kKnots; ++i) r[i] = lo_knot * std::exp(ratio * i);
          r.front() = lo_knot;
          r.back() = hi;
          // Cumulative mass of (a, r_i]; exact tail closure when present,
          // panelwise quadrature otherwise.
          if (d.tail_mass) {
            double t0 = dens_tail(d, a);
            for (int i = 0; i < kKnots; ++i)
              cum[i] = s.lambda * std::max(0.0, t0 - dens_tail(d, r[i]));
          } else {
            double acc = a < lo_knot
                             ? s.lambda * dens_integral(d, a, lo_knot,
                                                        [](double) { return 1.0; })
                             : 0.0;
            cum[0] = acc;
            for (int i = 1; i < kKnots; ++i) {
              acc += s.lambda * dens_integral(d, r[i - 1], r[i],
                                              [](double) { return 1.0; });
              cum[i] = acc;
            }
          }
          JumpSampler::Part dp;
          dp.sign = sign;
          dp.atomic = false;
          dp.mass = cum.back();
          // Strictly increasing cumulative knots for the inverse table.
          std::vector<double> fx, fr;
          fx.push_back(0.0);
          fr.push_back(lo_knot);
          for (int i = 0; i < kKnots; ++i) {
            if (cum[i] > fx.back() + dp.mass * 1e-14) {
              fx.push_back(cum[i]);
              fr.push_back(r[i]);
            }
          }
          if (fx.size() >= 4 && dp.mass > 1e-300) {
            dp.inv_cdf = MonotoneInterp(std::move(fx), std::move(fr));
            out.parts_.push_back(std::move(dp));
          }
        }
      }
    }
  }
  for (const auto& p : out.parts_) {
    out.mass_ += p.mass;
    out.part_cum_.push_back(out.mass_);
  }
  if (!(out.mass_ > 0.0))
    throw Error(errc::empty_truncation,
                "no jump mass above the requested truncation level");
  return out;
}

double JumpSampler::operator()(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, mass_);
  double u = unif(rng);
  std::size_t k = std::upper_bound(part_cum_.begin(), part_cum_.end(), u) -
                  part_cum_.begin();
  if (k >= parts_.size()) k = parts_.size() - 1;
  double base = k == 0 ? 0.0 : part_cum_[k - 1];
  double local = u - base;
  const Part& p = parts_[k];
  double r;
  if (p.atomic) {
    std::size_t j = std::upper_bound(p.atom_cum.begin(), p.atom_cum.end(), local) -
                    p.atom_cum.begin();
    if (j >= p.atom_r.size()) j = p.atom_r.size() - 1;
    r = p.atom_r[j];
  } else {
    r = p.inv_cdf(local);
  }
  return p.sign > 0 ? r : -r;
}

DiscretizedMeasure LevyMeasure::discretize(double r_min, double rel_tail) const {
  DiscretizedMeasure out;
  out.min_x = 0.0;
  out.max_x = 0.0;
  for (int idx : {0, 1}) {
    const RadialSide& s = sides_[idx];
    if (s.empty()) continue;
    double sign = idx == 0 ? -1.0 : 1.0;
    for (const Atom& at : s.atoms) {
      out.atoms.push_back({sign * at.r, s.lambda * at.mass});
      out.min_x = std::min(out.min_x, sign * at.r);
      out.max_x = std::max(out.max_x, sign * at.r);
    }
    if (!s.dens) continue;
    const RadialDensity& d = *s.dens;
    double a = std::max(d.lo, r_min);
    if (d.lo < a)
      out.sigma2_small +=
          s.lambda * dens_integral(d, d.lo, a, [](double r) { return r * r; });
    double full = dens_tail(d, a);
    if (!(full > 0.0)) continue;
    double hi = d.hi;
    if (hi == kInf) {
      hi = std::max(2.0 * std::max(a, 1.0), 2.0);
      for (int i = 0; i < 200 && dens_tail(d, hi) > rel_tail * full; ++i) hi *= 2.0;
      out.dropped_tail += s.lambda * dens_tail(d, hi);
    }
    // Geometric panels, each integrated against 16 Gauss-Legendre nodes;
    // interior singularities get their own panel edges.
    std::vector<double> edges;
    double e = a;
    while (e < hi) {
      edges.push_back(e);
      e = std::min(e * 2.0, hi);
      if (hi - e < 1e-14 * hi) e = hi;
    }
    edges.push_back(hi);
    for (double p : clip_breakpoints(d, a, hi)) edges.push_back(p);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    static const double gl_x[8] = {0.0950125098376374, 0.2816035507792589,
                                   0.4580167776572274, 0.6178762444026438,
                                   0.7554044083550030, 0.8656312023878318,
                                   0.9445750230732326, 0.9894009349916499};
    static const double gl_w[8] = {0.1894506104550685, 0.1826034150449236,
                                   0.1691565193950025, 0.1495959888165767,
                                   0.1246289712555339, 0.0951585116824928,
                                   0.0622535239386479, 0.0271524594117541};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      double c = 0.5 * (edges[i] + edges[i + 1]);
      double hw = 0.5 * (edges[i + 1] - edges[i]);
      if (!(hw > 0.0)) continue;
      for (int j = 0; j < 8; ++j) {
        for (double sgn : {-1.0, 1.0}) {
          double x = c + sgn * hw * gl_x[j];
          double wgt = s.lambda * hw * gl_w[j] * d.density(x);
          if (wgt > 0.0) {
            out.atoms.push_back({sign * x, wgt});
            out.min_x = std::min(out.min_x, sign * x);
            out.max_x = std::max(out.max_x, sign * x);
          }
        }
      }
    }
  }
  return out;
}

std::complex<double> LevyTriplet::cumulant(double z) const {
  cplx v(0.0, gamma * z);
  v -= 0.5 * a * z * z;
  if (!nu.is_zero()) v += nu.lk_integral(z);
  return v;
}

}  // namespace fid
