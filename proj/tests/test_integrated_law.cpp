#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <doctest.h>

#include "fid/catalog.hpp"
#include "fid/integrated_law.hpp"
#include "fid/kernel.hpp"
#include "fid/util/error.hpp"

using namespace fid;

namespace {

double rel_gap(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-12);
}

// max relative gap between the closed-form radial reference and the
// occupation-time pushforward density over log-spaced radii
double profile_gap(const std::string& class_id, const LevyTriplet& mu, const Kernel& h,
                   int sign, double r_lo, double r_hi, int npts) {
  LevyMeasure pushed = pushforward_measure(mu.nu, h);
  double worst = 0.0;
  for (int i = 0; i < npts; ++i) {
    double r = r_lo * std::pow(r_hi / r_lo, (i + 0.5) / npts);
    double want = radial_profile_reference(class_id, mu, h, sign, r);
    double got = pushed.density_at(sign > 0 ? r : -r);
    worst = std::max(worst, rel_gap(got, want));
  }
  return worst;
}

}  // namespace

TEST_CASE("unit atom through the exponential kernel spreads as 1/r") {
  LevyTriplet mu = make_law("poisson", {{"rate", "1"}});
  LevyMeasure pushed = pushforward_measure(mu.nu, make_kernel("ou_exp"));
  CHECK(pushed.radial_mass(+1, 0.1, 0.5) == doctest::Approx(std::log(5.0)).epsilon(1e-9));
  CHECK(pushed.radial_mass(+1, 0.5, 0.9) == doctest::Approx(std::log(1.8)).epsilon(1e-9));
  CHECK(pushed.density_at(0.25) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(pushed.radial_mass(+1, 1.0, kInf) == doctest::Approx(0.0));
}

TEST_CASE("constant kernels scale and stretch the measure") {
  LevyTriplet mu = make_law("gamma");
  Kernel flat = make_kernel("const", {{"c", "2"}, {"len", "3"}});
  LevyMeasure pushed = pushforward_measure(mu.nu, flat);
  // rho_h(r) = len * rho(r/c) / c
  CHECK(pushed.density_at(1.0) == doctest::Approx(3.0 * std::exp(-0.5)).epsilon(1e-10));
  CHECK(pushed.mass_above(2.0) ==
        doctest::Approx(3.0 * mu.nu.mass_above(1.0)).epsilon(1e-9));
}

TEST_CASE("radial reference formulas agree with the occupation pushforward") {
  LevyTriplet gam = make_law("gamma");
  LevyTriplet st = make_law("sym_stable", {{"alpha", "1.5"}});

  CHECK(profile_gap("selfdecomposable", gam, make_kernel("ou_exp"), +1, 0.05, 3.0, 8) <= 1e-5);
  CHECK(profile_gap("ggc", gam, make_kernel("ou_exp"), +1, 0.05, 3.0, 8) <= 1e-5);
  CHECK(profile_gap("thorin", gam, make_kernel("e1_inv"), +1, 0.05, 3.0, 8) <= 1e-5);
  CHECK(profile_gap("bondesson", gam, make_kernel("log_inv"), +1, 0.05, 3.0, 8) <= 1e-5);
  CHECK(profile_gap("thorin_alt", gam, make_kernel("log_inv"), +1, 0.05, 3.0, 8) <= 1e-5);
  CHECK(profile_gap("jurek", gam, make_kernel("linear_t"), +1, 0.05, 3.0, 8) <= 1e-5);
  CHECK(profile_gap("type_g", st, make_kernel("normal_tail_inv"), +1, 0.05, 3.0, 8) <= 1e-5);
  CHECK(profile_gap("type_g", st, make_kernel("normal_tail_inv"), -1, 0.05, 3.0, 8) <= 1e-5);
  CHECK(profile_gap("m_class", st, make_kernel("phi_over_t_inv"), +1, 0.05, 3.0, 8) <= 1e-5);
  CHECK(profile_gap("a_class", gam, make_kernel("cos_arc"), +1, 0.05, 3.0, 8) <= 1e-5);
  CHECK(profile_gap("type_g_alt", st, make_kernel("sqrtlog_half"), +1, 0.1, 2.0, 8) <= 1e-5);
  CHECK(profile_gap("gen_type_g", st, make_kernel("sqrtlog_one"), +1, 0.1, 2.0, 8) <= 1e-5);
}

TEST_CASE("arcsine pushforward of a unit atom keeps unit mass") {
  LevyTriplet mu = make_law("poisson", {{"rate", "1"}});  // nu = delta_1
  LevyMeasure pushed = pushforward_measure(mu.nu, make_kernel("cos_arc"));
  CHECK(std::abs(pushed.mass_above(0.0) - 1.0) <= 1e-8);
  // time above level r is (2/pi) acos(r)
  CHECK(pushed.radial_mass(+1, 0.5, kInf) ==
        doctest::Approx((2.0 / std::numbers::pi) * std::acos(0.5)).epsilon(1e-9));
}

TEST_CASE("integrated triplet reproduces the integral exponent") {
  struct Probe {
    LevyTriplet mu;
    const char* kernel;
    std::vector<double> zs;
  };
  std::vector<Probe> probes = {
      {make_law("gamma"), "ou_exp", {0.5, -1.5, 2.0}},
      {make_law("poisson", {{"rate", "1"}}), "linear_t", {1.0, -2.0}},
      {make_law("sym_stable", {{"alpha", "1.5"}}), "normal_tail_inv", {0.8}},
      {make_law("compound_poisson", {{"rate", "1"}, {"jumps", "0.4:1,-0.9:0.5"}}),
       "log_inv",
       {1.0, -0.6}},
  };
  for (const auto& p : probes) {
    Kernel h = make_kernel(p.kernel);
    IntegratedLaw law = integrate_law(p.mu, h);
    for (double z : p.zs) {
      std::complex<double> direct = cumulant_of_integral(p.mu, h, z);
      std::complex<double> via_triplet = law.triplet.cumulant(z);
      INFO(p.kernel, " z=", z);
      CHECK(std::abs(direct - via_triplet) <= 1e-6 * (1.0 + std::abs(direct)));
    }
  }
}

TEST_CASE("gaussian parts scale by the quadratic moment") {
  LevyTriplet g = make_law("gaussian", {{"mean", "0.3"}, {"var", "2"}});
  IntegratedLaw law = integrate_law(g, make_kernel("ou_exp"));
  CHECK(law.triplet.a == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(law.triplet.gamma == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(law.triplet.nu.is_zero());
  CHECK(cumulant_of_integral(g, make_kernel("ou_exp"), 0.0) == std::complex<double>(0.0, 0.0));
}

TEST_CASE("constant kernel integral is an exact rescaling") {
  LevyTriplet mu = make_law("poisson", {{"rate", "1"}});
  Kernel flat = make_kernel("const", {{"c", "1"}, {"len", "2"}});
  for (double z : {0.7, -1.3}) {
    std::complex<double> direct = cumulant_of_integral(mu, flat, z);
    std::complex<double> want = 2.0 * mu.cumulant(z);
    CHECK(std::abs(direct - want) <= 1e-12 * (1.0 + std::abs(want)));
  }
  IntegratedLaw law = integrate_law(mu, flat);
  CHECK(law.triplet.gamma == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(law.triplet.nu.radial_mass(+1, 0.5, 1.5) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("infinite-horizon kernels enforce the log-tail test") {
  RadialDensity dens;
  dens.kind = ProfileKind::RawDensity;
  dens.profile = [](double r) { return 1.0 / (r * std::log(r) * std::log(r)); };
  dens.lo = std::numbers::e;
  dens.hi = kInf;
  dens.tail = TailClass::PowerLaw;
  dens.power_alpha = 0.0;
  RadialSide pos;
  pos.dens = dens;
  LevyTriplet heavy{0.0, 0.0, LevyMeasure::from_sides(RadialSide{}, std::move(pos))};
  CHECK_THROWS_WITH_AS(integrate_law(heavy, make_kernel("ou_exp")),
                       doctest::Contains("log"), Error);
  // the same driver is fine on a finite horizon
  CHECK_NOTHROW(integrate_law(heavy, make_kernel("linear_t")));
  // cauchy tails are heavy but log-integrable
  CHECK_NOTHROW(integrate_law(make_law("cauchy"), make_kernel("ou_exp")));
}

TEST_CASE("non-monotone kernels have no pushforward") {
  Kernel k = make_custom_kernel("bump", [](double t) { return t * (1.0 - t); }, 1.0);
  LevyTriplet mu = make_law("gamma");
  CHECK_THROWS_AS(pushforward_measure(mu.nu, k), Error);
  // but the exponent is still available by direct time quadrature
  std::complex<double> c = cumulant_of_integral(mu, k, 1.0);
  CHECK(std::isfinite(c.real()));
  CHECK(std::isfinite(c.imag()));
}
