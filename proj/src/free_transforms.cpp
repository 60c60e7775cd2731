#include "fid/free_transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fid/util/error.hpp"

namespace fid {
namespace {

using cplx = std::complex<double>;

constexpr double kPi = std::numbers::pi;

// Polynomial extrapolation of (xs, ys) to x = 0; err receives the change at
// the deepest Neville stage.
double neville_at_zero(const std::vector<double>& xs, const std::vector<double>& ys,
                       double* err) {
  std::vector<double> t = ys;
  const std::size_t n = t.size();
  double prev = t[0], cur = t[0];
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = 0; i + k < n; ++i)
      t[i] = (-xs[i + k] * t[i] + xs[i] * t[i + 1]) / (xs[i] - xs[i + k]);
    prev = cur;
    cur = t[0];
  }
  if (err) *err = n > 1 ? std::abs(cur - prev) : kInf;
  return cur;
}

struct EvalPair {
  cplx value;
  cplx deriv;
};

EvalPair fast_pair(double gamma, double a_eff,
                   const std::vector<std::pair<double, double>>& atoms, cplx w) {
  cplx c = gamma * w + a_eff * w * w;
  cplx cp = cplx(gamma, 0.0) + 2.0 * a_eff * w;
  for (const auto& [x, m] : atoms) {
    const cplx inv = 1.0 / (1.0 - x * w);
    const double tr = std::abs(x) <= 1.0 ? x : 0.0;
    c += m * (inv - 1.0 - tr * w);
    cp += m * (x * inv * inv - tr);
  }
  return {c, cp};
}

}  // namespace

double semicircle_density(double x, double variance) {
  if (!(variance > 0.0)) throw Error(errc::invalid_config, "variance must be positive");
  const double r2 = 4.0 * variance;
  if (x * x >= r2) return 0.0;
  return 2.0 * std::sqrt(r2 - x * x) / (kPi * r2);
}

double semicircle_cdf(double x, double variance) {
  if (!(variance > 0.0)) throw Error(errc::invalid_config, "variance must be positive");
  const double r = 2.0 * std::sqrt(variance);
  if (x <= -r) return 0.0;
  if (x >= r) return 1.0;
  return 0.5 + x * std::sqrt(r * r - x * x) / (kPi * r * r) + std::asin(x / r) / kPi;
}

double marchenko_pastur_density(double x) {
  if (x <= 0.0 || x >= 4.0) return 0.0;
  return std::sqrt((4.0 - x) / x) / (2.0 * kPi);
}

double marchenko_pastur_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 4.0) return 1.0;
  return (kPi + std::sqrt(x * (4.0 - x)) - 2.0 * std::asin(1.0 - x / 2.0)) /
         (2.0 * kPi);
}

FreeLaw::FreeLaw(LevyTriplet mu, FreeLawOptions opt)
    : mu_(std::move(mu)), opt_(opt) {
  a_eff_ = mu_.a;
  if (!mu_.nu.is_zero()) {
    // Make the tail cut effectively absolute (~1e-13) even when the measure
    // has enormous total mass above the small-jump floor.
    const double full = mu_.nu.mass_above(1e-8);
    const double rel = 1e-13 / std::max(1.0, full);
    DiscretizedMeasure dm = mu_.nu.discretize(1e-8, rel);
    atoms_ = std::move(dm.atoms);
    a_eff_ += dm.sigma2_small;
  }
  double m1 = mu_.gamma, var = a_eff_;
  for (const auto& [x, m] : atoms_) {
    if (std::abs(x) > 1.0) m1 += x * m;
    var += x * x * m;
  }
  scale_ = 1.0 + std::sqrt(std::max(var, 0.0)) + std::abs(m1);
}

std::complex<double> FreeLaw::free_cumulant(std::complex<double> z) const {
  return mu_.gamma * z + mu_.a * z * z + mu_.nu.free_lk_integral(z);
}

std::complex<double> FreeLaw::free_cumulant_fast(std::complex<double> z) const {
  return fast_pair(mu_.gamma, a_eff_, atoms_, z).value;
}

std::complex<double> FreeLaw::solve_at(std::complex<double> zeta,
                                       std::complex<double> w) const {
  const double tol = 1e-10 * (1.0 + std::abs(zeta));
  auto resid = [&](cplx v) { return (1.0 + fast_pair(mu_.gamma, a_eff_, atoms_, v).value) / v - zeta; };
  for (int it = 0; it < 80; ++it) {
    const EvalPair e = fast_pair(mu_.gamma, a_eff_, atoms_, w);
    const cplx F = (1.0 + e.value) / w - zeta;
    if (std::abs(F) <= tol) return w;
    const cplx Fp = (e.deriv * w - (1.0 + e.value)) / (w * w);
    if (!std::isfinite(std::abs(Fp)) || Fp == cplx(0.0, 0.0)) break;
    const cplx step = F / Fp;
    double lam = 1.0;
    bool moved = false;
    for (int k = 0; k < 45; ++k, lam *= 0.5) {
      const cplx wn = w - lam * step;
      if (!(wn.imag() < 0.0)) continue;  // G of the upper half plane stays below
      if (std::abs(resid(wn)) < std::abs(F)) {
        w = wn;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (std::abs(resid(w)) <= tol) return w;
  throw Error(errc::continuation_failure,
              "transform inversion stalled at zeta = (" +
                  std::to_string(zeta.real()) + ", " + std::to_string(zeta.imag()) +
                  ")");
}

std::complex<double> FreeLaw::descend(std::complex<double> zeta) const {
  if (!(zeta.imag() > 0.0))
    throw Error(errc::invalid_config, "transform needs Im zeta > 0");
  const double y0 = std::max(8.0 * scale_, 8.0);
  if (zeta.imag() >= y0) return solve_at(zeta, 1.0 / zeta);
  cplx cur(zeta.real(), y0);
  cplx w = solve_at(cur, 1.0 / cur);
  while (cur.imag() > zeta.imag() * 1.0000001) {
    cur = cplx(zeta.real(), std::max(zeta.imag(), cur.imag() / 1.35));
    w = solve_at(cur, w);
  }
  return w;
}

std::complex<double> FreeLaw::cauchy(std::complex<double> zeta) const {
  if (auto pm = point_mass()) return 1.0 / (zeta - *pm);
  return descend(zeta);
}

double FreeLaw::density(double x) const { return density(x, opt_.density_tol); }

double FreeLaw::density(double x, double tol) const {
  if (point_mass())
    throw Error(errc::degenerate_set, "point law has no boundary density");
  std::vector<double> ds, fs;
  cplx w = descend(cplx(x, opt_.delta0));
  ds.push_back(opt_.delta0);
  fs.push_back(-w.imag() / kPi);
  double best = fs[0], err = kInf;
  double delta = opt_.delta0;
  while (delta > opt_.delta_min * 1.0000001) {
    delta = std::max(delta / 10.0, opt_.delta_min);
    w = solve_at(cplx(x, delta), w);
    ds.push_back(delta);
    fs.push_back(-w.imag() / kPi);
    best = neville_at_zero(ds, fs, &err);
    if (ds.size() >= 3 && err <= 0.25 * tol) break;
  }
  return std::max(best, 0.0);
}

std::optional<double> FreeLaw::point_mass() const {
  if (mu_.a == 0.0 && mu_.nu.is_zero()) return mu_.gamma;
  return std::nullopt;
}

void FreeLaw::build_grid() const {
  if (grid_) return;
  auto g = std::make_shared<Grid>();
  if (auto pm = point_mass()) {
    g->x = {*pm - 1.0, *pm, *pm + 1.0};
    g->density = {0.0, 0.0, 0.0};
    g->cdf = {0.0, 1.0, 1.0};
    g->lo = g->hi = *pm;
    grid_ = std::move(g);
    return;
  }
  double m1 = mu_.gamma, var = a_eff_;
  for (const auto& [x, m] : atoms_) {
    if (std::abs(x) > 1.0) m1 += x * m;
    var += x * x * m;
  }
  double lo = m1 - 2.05 * std::sqrt(var) - 1e-3;
  double hi = m1 + 2.05 * std::sqrt(var) + 1e-3;
  for (int i = 0; i < 60; ++i) {
    const double span = hi - lo;
    bool grew = false;
    if (density(lo, 1e-3) > 0.1 * opt_.scan_threshold) {
      lo -= 0.25 * span;
      grew = true;
    }
    if (density(hi, 1e-3) > 0.1 * opt_.scan_threshold) {
      hi += 0.25 * span;
      grew = true;
    }
    if (!grew) break;
  }

  const int n = std::max(opt_.grid_points, 9);
  g->x.resize(n);
  for (int i = 0; i < n; ++i) g->x[i] = lo + (hi - lo) * i / (n - 1.0);

  std::vector<double> deltas;
  for (double d = opt_.delta0; d >= 1e-5 * 0.999 && d >= opt_.delta_min; d /= 10.0)
    deltas.push_back(d);
  std::vector<std::vector<double>> rows(deltas.size(), std::vector<double>(n));
  std::vector<cplx> w_last(n);
  for (std::size_t r = 0; r < deltas.size(); ++r) {
    cplx w = descend(cplx(g->x[0], deltas[r]));
    rows[r][0] = -w.imag() / kPi;
    if (r + 1 == deltas.size()) w_last[0] = w;
    for (int i = 1; i < n; ++i) {
      w = solve_at(cplx(g->x[i], deltas[r]), w);
      rows[r][i] = -w.imag() / kPi;
      if (r + 1 == deltas.size()) w_last[i] = w;
    }
  }
  g->density.resize(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> ds = deltas, fs;
    for (std::size_t r = 0; r < deltas.size(); ++r) fs.push_back(rows[r][i]);
    double err;
    double v = neville_at_zero(ds, fs, &err);
    cplx w = w_last[i];
    double delta = ds.back();
    while (err > 0.25 * opt_.density_tol && delta > opt_.delta_min * 1.0000001) {
      delta = std::max(delta / 10.0, opt_.delta_min);
      w = solve_at(cplx(g->x[i], delta), w);
      ds.push_back(delta);
      fs.push_back(-w.imag() / kPi);
      v = neville_at_zero(ds, fs, &err);
    }
    g->density[i] = std::max(v, 0.0);
  }

  g->cdf.resize(n);
  double acc = 0.0;
  g->cdf[0] = 0.0;
  for (int i = 1; i < n; ++i) {
    acc += 0.5 * (g->density[i] + g->density[i - 1]) * (g->x[i] - g->x[i - 1]);
    g->cdf[i] = acc;
  }
  g->escaped = std::max(0.0, 1.0 - acc);
  g->lo = g->x.front();
  g->hi = g->x.back();
  for (int i = 0; i < n; ++i)
    if (g->density[i] > opt_.scan_threshold) {
      g->lo = g->x[i];
      break;
    }
  for (int i = n - 1; i >= 0; --i)
    if (g->density[i] > opt_.scan_threshold) {
      g->hi = g->x[i];
      break;
    }
  grid_ = std::move(g);
}

const FreeLaw::Grid& FreeLaw::grid() const {
  build_grid();
  return *grid_;
}

double FreeLaw::cdf(double x) const {
  if (auto pm = point_mass()) return x >= *pm ? 1.0 : 0.0;
  build_grid();
  const Grid& g = *grid_;
  if (x <= g.x.front()) return 0.0;
  if (x >= g.x.back()) return g.cdf.back();
  auto it = std::upper_bound(g.x.begin(), g.x.end(), x);
  const std::size_t i = it - g.x.begin();
  const double t = (x - g.x[i - 1]) / (g.x[i] - g.x[i - 1]);
  return g.cdf[i - 1] + t * (g.cdf[i] - g.cdf[i - 1]);
}

std::pair<double, double> FreeLaw::support() const {
  build_grid();
  return {grid_->lo, grid_->hi};
}

double FreeLaw::escaped_mass() const {
  build_grid();
  return grid_->escaped;
}

}  // namespace fid
