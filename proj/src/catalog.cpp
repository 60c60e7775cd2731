#include "fid/catalog.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>

#include <boost/math/special_functions/gamma.hpp>

#include "fid/util/error.hpp"
#include "fid/util/special.hpp"

namespace fid {

namespace {

using cplx = std::complex<double>;

double parse_double(const std::string& s, const std::string& key) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw Error(errc::invalid_config, "parameter '" + key + "' is not a number: " + s);
  return v;
}

void check_keys(const Params& p, const std::set<std::string>& allowed,
                const std::string& law) {
  for (const auto& [k, v] : p)
    if (!allowed.count(k))
      throw Error(errc::invalid_config,
                  "unknown parameter '" + k + "' for law '" + law + "'");
}

// int_0^inf (1 - cos u) u^{-1-alpha} du, the symmetric-stable normalizer.
double stable_normalizer(double alpha) {
  if (std::fabs(alpha - 1.0) < 1e-12) return std::numbers::pi / 2.0;
  return -boost::math::tgamma(-alpha) * std::cos(std::numbers::pi * alpha / 2.0);
}

LevyTriplet gaussian_law(const Params& p) {
  check_keys(p, {"mean", "var"}, "gaussian");
  LevyTriplet t;
  t.gamma = param_double(p, "mean", 0.0);
  t.a = param_double(p, "var", 1.0);
  if (t.a < 0.0) throw Error(errc::invalid_config, "gaussian variance must be >= 0");
  return t;
}

LevyTriplet delta_law(const Params& p) {
  check_keys(p, {"shift"}, "delta");
  LevyTriplet t;
  t.gamma = param_double(p, "shift", 0.0);
  return t;
}

LevyTriplet poisson_law(const Params& p) {
  check_keys(p, {"rate"}, "poisson");
  double rate = param_double(p, "rate", 1.0);
  if (!(rate > 0.0)) throw Error(errc::invalid_config, "poisson rate must be > 0");
  LevyTriplet t;
  t.nu = LevyMeasure::from_atoms({{1.0, rate}});
  t.gamma = rate;  // the unit atom sits inside the truncation ball
  return t;
}

LevyTriplet gamma_law(const Params& p) {
  check_keys(p, {"alpha", "beta"}, "gamma");
  double alpha = param_double(p, "alpha", 1.0);
  double beta = param_double(p, "beta", 1.0);
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw Error(errc::invalid_config, "gamma needs alpha > 0 and beta > 0");
  RadialSide pos;
  RadialDensity d;
  d.kind = ProfileKind::KFunction;  // k(r) = alpha e^{-beta r}, nonincreasing
  d.profile = [alpha, beta](double r) { return alpha * std::exp(-beta * r); };
  d.lo = 0.0;
  d.hi = kInf;
  d.tail = TailClass::Exponential;
  d.analytic = [alpha, beta](cplx z) { return alpha * std::exp(-beta * z) / z; };
  d.tail_mass = [alpha, beta](double r) { return alpha * expint_e1(beta * r); };
  pos.dens = std::move(d);
  LevyTriplet t;
  t.nu = LevyMeasure::from_sides({}, std::move(pos));
  t.gamma = alpha / beta * (1.0 - std::exp(-beta));  // int_0^1 x nu(dx)
  return t;
}

LevyTriplet stable_like_law(double alpha, double scale) {
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw Error(errc::invalid_config, "stable index must lie in (0, 2)");
  if (!(scale > 0.0)) throw Error(errc::invalid_config, "scale must be > 0");
  // lambda = scale^alpha / (2 I_alpha) makes the exponent exactly
  // -scale^alpha |z|^alpha.
  double lam = std::pow(scale, alpha) / (2.0 * stable_normalizer(alpha));
  auto make_side = [&]() {
    RadialSide s;
    s.lambda = lam;
    RadialDensity d;
    d.kind = ProfileKind::RawDensity;
    d.profile = [alpha](double r) { return std::pow(r, -1.0 - alpha); };
    d.lo = 0.0;
    d.hi = kInf;
    d.tail = TailClass::PowerLaw;
    d.power_alpha = alpha;
    d.origin_alpha = alpha;
    d.analytic = [alpha](cplx z) { return std::pow(z, cplx(-1.0 - alpha)); };
    d.tail_mass = [alpha](double r) { return std::pow(r, -alpha) / alpha; };
    s.dens = std::move(d);
    return s;
  };
  LevyTriplet t;
  t.nu = LevyMeasure::from_sides(make_side(), make_side());
  return t;  // symmetric: gamma = 0
}

LevyTriplet cauchy_law(const Params& p) {
  check_keys(p, {"scale"}, "cauchy");
  return stable_like_law(1.0, param_double(p, "scale", 1.0));
}

LevyTriplet sym_stable_law(const Params& p) {
  check_keys(p, {"alpha", "scale"}, "sym_stable");
  return stable_like_law(param_double(p, "alpha", 1.5),
                         param_double(p, "scale", 1.0));
}

LevyTriplet compound_poisson_law(const Params& p) {
  check_keys(p, {"rate", "jumps"}, "compound_poisson");
  double rate = param_double(p, "rate", 1.0);
  if (!(rate > 0.0)) throw Error(errc::invalid_config, "rate must be > 0");
  auto jumps = param_atoms(p, "jumps", "1:0.5,-1:0.5");
  double total = 0.0;
  for (auto& [x, m] : jumps) total += m;
  if (!(total > 0.0)) throw Error(errc::invalid_config, "jump weights must be > 0");
  LevyTriplet t;
  std::vector<std::pair<double, double>> atoms;
  for (auto& [x, m] : jumps) {
    double mass = rate * m / total;
    atoms.push_back({x, mass});
    if (std::fabs(x) <= 1.0) t.gamma += mass * x;
  }
  t.nu = LevyMeasure::from_atoms(atoms);
  return t;
}

// Law whose jump measure has, on each side, the arcsine-sprayed density
// sum_j m_j (2/pi) (s_j - r^2)^{-1/2} on 0 < r < sqrt(s_j), s_j = x_j^2.
LevyTriplet a_class_law(const Params& p) {
  check_keys(p, {"rho"}, "a_class");
  auto rho = param_atoms(p, "rho", "1:1");
  LevyTriplet t;
  std::array<std::vector<std::pair<double, double>>, 2> by_side;  // (|x|, m)
  for (auto& [x, m] : rho) {
    if (x == 0.0 || !(m > 0.0))
      throw Error(errc::invalid_config, "rho atoms need x != 0 and mass > 0");
    by_side[x > 0 ? 1 : 0].push_back({std::fabs(x), m});
  }
  std::array<RadialSide, 2> sides;
  constexpr double two_over_pi = 2.0 / std::numbers::pi;
  for (int idx : {0, 1}) {
    auto list = by_side[idx];
    if (list.empty()) continue;
    double hi = 0.0;
    for (auto& [r0, m] : list) hi = std::max(hi, r0);
    RadialDensity d;
    d.kind = ProfileKind::RawDensity;
    d.profile = [list, two_over_pi](double r) {
      double v = 0.0;
      for (auto& [r0, m] : list)
        // (r0 - r)(r0 + r) avoids the cancellation of r0^2 - r^2 at the edge.
        if (r < r0) v += m * two_over_pi / std::sqrt((r0 - r) * (r0 + r));
      return v;
    };
    d.lo = 0.0;
    d.hi = hi;
    d.tail = TailClass::Bounded;
    d.tail_mass = [list, two_over_pi, hi](double r) {
      double v = 0.0;
      for (auto& [r0, m] : list)
        if (r < r0)
          v += m * two_over_pi * (std::numbers::pi / 2.0 - std::asin(r / r0));
      return v;
    };
    for (auto& [r0, m] : list)
      if (r0 < hi) d.breakpoints.push_back(r0);
    sides[idx].dens = std::move(d);
    double sign = idx == 0 ? -1.0 : 1.0;
    for (auto& [r0, m] : list) {
      double c = std::min(1.0, r0);
      t.gamma += sign * m * two_over_pi * (r0 - std::sqrt(r0 * r0 - c * c));
    }
  }
  t.nu = LevyMeasure::from_sides(std::move(sides[0]), std::move(sides[1]));
  return t;
}

}  // namespace

double param_double(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  return parse_double(it->second, key);
}

std::vector<std::pair<double, double>> param_atoms(const Params& p, const std::string& key,
                                                   const std::string& fallback) {
  std::string spec = fallback;
  if (auto it = p.find(key); it != p.end()) spec = it->second;
  std::vector<std::pair<double, double>> out;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t comma = spec.find(',', pos);
    std::string item = spec.substr(pos, comma == std::string::npos ? std::string::npos
                                                                   : comma - pos);
    std::size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw Error(errc::invalid_config, "atom list entries must be x:mass, got: " + item);
    out.push_back({parse_double(item.substr(0, colon), key),
                   parse_double(item.substr(colon + 1), key)});
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw Error(errc::invalid_config, "empty atom list for " + key);
  return out;
}

LevyTriplet make_law(const std::string& name, const Params& params) {
  if (name == "gaussian") return gaussian_law(params);
  if (name == "delta") return delta_law(params);
  if (name == "poisson") return poisson_law(params);
  if (name == "gamma") return gamma_law(params);
  if (name == "cauchy") return cauchy_law(params);
  if (name == "sym_stable") return sym_stable_law(params);
  if (name == "compound_poisson") return compound_poisson_law(params);
  if (name == "a_class") return a_class_law(params);
  throw Error(errc::unknown_name, "unknown law: " + name);
}

std::vector<std::string> catalog_laws() {
  return {"gaussian", "delta",      "poisson",          "gamma",
          "cauchy",   "sym_stable", "compound_poisson", "a_class"};
}

}  // namespace fid
