#include <cmath>
#include <complex>
#include <numbers>

#include <doctest.h>

#include "fid/catalog.hpp"
#include "fid/levy_measure.hpp"
#include "fid/util/error.hpp"
#include "fid/util/quad.hpp"
#include "fid/util/rng.hpp"
#include "fid/util/special.hpp"

using namespace fid;

namespace {

bool close_c(std::complex<double> a, std::complex<double> b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::abs(b));
}

}  // namespace

TEST_CASE("gamma law characteristic exponent matches the closed form") {
  LevyTriplet mu = make_law("gamma");  // alpha = beta = 1
  // log CF of Gamma(1,1) is -log(1 - i z).
  CHECK(close_c(mu.cumulant(1.0), -std::log(std::complex<double>(1.0, -1.0)), 1e-9));
  CHECK(close_c(mu.cumulant(1.0),
                std::complex<double>(-0.34657359027997264, 0.7853981633974483), 1e-9));
  CHECK(close_c(mu.cumulant(-2.0), -std::log(std::complex<double>(1.0, 2.0)), 1e-9));
  LevyTriplet mu2 = make_law("gamma", {{"alpha", "2.5"}, {"beta", "1.7"}});
  CHECK(close_c(mu2.cumulant(0.9),
                -2.5 * std::log(std::complex<double>(1.0, -0.9 / 1.7)), 1e-9));
}

TEST_CASE("poisson and compound poisson exponents") {
  LevyTriplet mu = make_law("poisson", {{"rate", "1"}});
  CHECK(close_c(mu.cumulant(1.0), std::complex<double>(std::cos(1.0) - 1.0, std::sin(1.0)),
                1e-12));
  LevyTriplet cp = make_law("compound_poisson", {{"rate", "1.2"}, {"jumps", "0.5:1,-1.3:0.4"}});
  // rate scales the normalized atom masses; recompute the exponent directly.
  double total = 1.0 + 0.4;
  double m1 = 1.2 * 1.0 / total, m2 = 1.2 * 0.4 / total;
  double z = 1.3;
  std::complex<double> want =
      m1 * (std::exp(std::complex<double>(0.0, z * 0.5)) - 1.0) +
      m2 * (std::exp(std::complex<double>(0.0, z * -1.3)) - 1.0);
  CHECK(close_c(cp.cumulant(z), want, 1e-12));
}

TEST_CASE("stable exponents are pure decay") {
  LevyTriplet st = make_law("sym_stable", {{"alpha", "1.5"}});
  CHECK(st.cumulant(2.0).real() == doctest::Approx(-std::pow(2.0, 1.5)).epsilon(1e-7));
  CHECK(st.cumulant(2.0).imag() == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(st.cumulant(-0.7).real() == doctest::Approx(-std::pow(0.7, 1.5)).epsilon(1e-7));
  LevyTriplet ca = make_law("cauchy");
  CHECK(ca.cumulant(3.0).real() == doctest::Approx(-3.0).epsilon(1e-7));
  CHECK(ca.cumulant(3.0).imag() == doctest::Approx(0.0).epsilon(1e-8));
  LevyTriplet ca2 = make_law("cauchy", {{"scale", "0.6"}});
  CHECK(ca2.cumulant(3.0).real() == doctest::Approx(-1.8).epsilon(1e-7));
}

TEST_CASE("arcsine-spread atoms integrate to their seed mass") {
  LevyTriplet mu = make_law("a_class", {{"rho", "1:1"}});
  CHECK(mu.nu.mass_above(0.0) == doctest::Approx(1.0).epsilon(1e-10));
  // int_{1/2}^1 (2/pi)(1-r^2)^{-1/2} dr = 2/3 of nothing: (2/pi)(pi/2 - asin(1/2)) = 2/3.
  CHECK(mu.nu.radial_mass(+1, 0.5, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(mu.nu.density_at(0.6) ==
        doctest::Approx((2.0 / std::numbers::pi) / std::sqrt(1.0 - 0.36)).epsilon(1e-12));
}

TEST_CASE("truncated moments of the gamma jump measure") {
  LevyTriplet mu = make_law("gamma");
  double eps = 0.5;
  CHECK(mu.nu.truncated_mean_above(eps) ==
        doctest::Approx(std::exp(-eps) - std::exp(-1.0)).epsilon(1e-10));
  CHECK(mu.nu.x2_below(eps) ==
        doctest::Approx(1.0 - (1.0 + eps) * std::exp(-eps)).epsilon(1e-9));
  CHECK(mu.nu.mass_above(eps) == doctest::Approx(expint_e1(eps)).epsilon(1e-10));
}

TEST_CASE("jump sampler reproduces the restricted law") {
  LevyTriplet mu = make_law("gamma");
  auto sampler = mu.nu.sampler_above(0.1);
  CHECK(sampler.total_mass() == doctest::Approx(expint_e1(0.1)).epsilon(1e-9));
  Rng rng = replica_stream(77, 0);
  const int n = 20000;
  double sum = 0.0, sumsq = 0.0;
  double min_draw = 1e9;
  for (int i = 0; i < n; ++i) {
    double x = sampler(rng);
    min_draw = std::min(min_draw, x);
    sum += x;
    sumsq += x * x;
  }
  double mean = sum / n;
  double want = std::exp(-0.1) / expint_e1(0.1);
  double se = std::sqrt((sumsq / n - mean * mean) / n);
  CHECK(min_draw > 0.1);
  CHECK(std::abs(mean - want) <= 4.0 * se);

  auto st = make_law("sym_stable", {{"alpha", "1.2"}}).nu.sampler_above(0.05);
  Rng rng2 = replica_stream(77, 1);
  int pos = 0;
  for (int i = 0; i < n; ++i) {
    double x = st(rng2);
    CHECK(std::abs(x) > 0.05);
    if (x > 0) ++pos;
  }
  CHECK(std::abs(pos - n / 2.0) <= 4.0 * std::sqrt(n / 4.0));
}

TEST_CASE("sampling with no mass above the cutoff is rejected") {
  LevyTriplet mu = make_law("poisson", {{"rate", "2"}});
  CHECK_THROWS_WITH_AS(mu.nu.sampler_above(1.5), doctest::Contains("truncation"), Error);
}

TEST_CASE("log-tail admissibility test") {
  CHECK(make_law("gamma").nu.ilog_integral().has_value());
  CHECK(make_law("sym_stable", {{"alpha", "0.7"}}).nu.ilog_integral().has_value());

  // density 1/(x log^2 x) on (e, inf): total mass 1 but log-moment diverges.
  RadialDensity dens;
  dens.kind = ProfileKind::RawDensity;
  dens.profile = [](double r) { return 1.0 / (r * std::log(r) * std::log(r)); };
  dens.lo = std::numbers::e;
  dens.hi = kInf;
  dens.tail = TailClass::PowerLaw;
  dens.power_alpha = 0.0;
  RadialSide pos;
  pos.dens = dens;
  LevyMeasure heavy = LevyMeasure::from_sides(RadialSide{}, std::move(pos));
  CHECK_FALSE(heavy.ilog_integral().has_value());
  CHECK_THROWS_AS(heavy.require_ilog(), Error);
}

TEST_CASE("polar decomposition splits signs") {
  LevyTriplet cp = make_law("compound_poisson", {{"rate", "1"}, {"jumps", "0.5:1,-1.3:3"}});
  auto polar = cp.nu.polar_decompose();
  REQUIRE(polar.radial[0] != nullptr);
  REQUIRE(polar.radial[1] != nullptr);
  CHECK(polar.lambda[0] > 0.0);
  CHECK(polar.lambda[1] > 0.0);
  // reassembling both sides reproduces the total mass
  double total = cp.nu.mass_above(0.0);
  double neg = cp.nu.radial_mass(-1, 0.0, kInf);
  double pos = cp.nu.radial_mass(+1, 0.0, kInf);
  CHECK(total == doctest::Approx(neg + pos).epsilon(1e-12));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(LevyMeasure::zero().polar_decompose(), Error);
}

TEST_CASE("panel discretization conserves mass and small-jump variance") {
  LevyTriplet mu = make_law("gamma");
  auto disc = mu.nu.discretize(1e-8, 1e-12);
  double kept = 0.0;
  for (auto& [x, m] : disc.atoms) {
    CHECK(x > 0.0);
    kept += m;
  }
  CHECK(kept + disc.dropped_tail ==
        doctest::Approx(mu.nu.mass_above(1e-8)).epsilon(1e-6));
  CHECK(disc.sigma2_small == doctest::Approx(mu.nu.x2_below(1e-8)).epsilon(1e-4));
  CHECK(disc.dropped_tail <= 1e-10);

  // first and second moments of the panel atoms against quadrature
  double m1 = 0.0, m2 = 0.0;
  for (auto& [x, m] : disc.atoms) {
    m1 += x * m;
    m2 += x * x * m;
  }
  CHECK(m1 == doctest::Approx(1.0).epsilon(1e-6));  // int_0^inf x e^{-x}/x dx
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-6));  // int_0^inf x^2 e^{-x}/x dx
}
