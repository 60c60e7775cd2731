#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "fid/catalog.hpp"
#include "fid/free_transforms.hpp"

using namespace fid;

namespace {
constexpr double kPi = std::numbers::pi;

double residual(const FreeLaw& law, std::complex<double> zeta) {
  std::complex<double> g = law.cauchy(zeta);
  return std::abs(1.0 / g + law.free_cumulant_fast(g) / g - zeta);
}
}  // namespace

TEST_CASE("closed-form reference densities") {
  CHECK(semicircle_density(0.0, 1.0) == doctest::Approx(1.0 / kPi).epsilon(1e-12));
  CHECK(semicircle_density(2.0, 1.0) == doctest::Approx(0.0));
  CHECK(semicircle_density(0.5, 0.25) ==
        doctest::Approx(std::sqrt(1.0 - 0.25) * 2.0 / (0.5 * kPi)).epsilon(1e-12));
  CHECK(semicircle_cdf(-2.0, 1.0) == doctest::Approx(0.0));
  CHECK(semicircle_cdf(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(semicircle_cdf(1.0, 1.0) ==
        doctest::Approx(0.5 + std::sqrt(3.0) / (4.0 * kPi) + 1.0 / 6.0).epsilon(1e-12));

  CHECK(marchenko_pastur_density(2.0) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-12));
  CHECK(marchenko_pastur_density(4.5) == doctest::Approx(0.0));
  CHECK(marchenko_pastur_cdf(0.0) == doctest::Approx(0.0));
  CHECK(marchenko_pastur_cdf(4.0) == doctest::Approx(1.0).epsilon(1e-12));
  // cdf differentiates back to the density
  for (double x : {0.5, 1.5, 3.2}) {
    double dd = (marchenko_pastur_cdf(x + 5e-7) - marchenko_pastur_cdf(x - 5e-7)) / 1e-6;
    CHECK(dd == doctest::Approx(marchenko_pastur_density(x)).epsilon(1e-5));
  }
}

TEST_CASE("gaussian driver gives the semicircle") {
  FreeLawOptions opt;
  opt.grid_points = 401;
  FreeLaw law(make_law("gaussian", {{"mean", "0"}, {"var", "1"}}), opt);
  CHECK(!law.point_mass().has_value());

  std::complex<double> g = law.cauchy({0.0, 2.0});
  CHECK(std::abs(g - std::complex<double>(0.0, 1.0 - std::numbers::sqrt2)) <= 1e-9);

  for (double x : {0.0, 0.5, -1.2, 1.7})
    CHECK(std::abs(law.density(x) - semicircle_density(x, 1.0)) <= 1e-3);

  CHECK(std::abs(law.cdf(0.0) - 0.5) <= 1e-3);
  CHECK(std::abs(law.cdf(1.0) - semicircle_cdf(1.0, 1.0)) <= 2e-3);
  auto [lo, hi] = law.support();
  CHECK(lo == doctest::Approx(-2.0).epsilon(0.03));
  CHECK(hi == doctest::Approx(2.0).epsilon(0.03));
  CHECK(law.escaped_mass() <= 2e-3);

  for (std::complex<double> zeta : {std::complex<double>(0.5, 0.02),
                                    std::complex<double>(-1.0, 0.01),
                                    std::complex<double>(2.5, 1e-3)})
    CHECK(residual(law, zeta) <= 1e-10 * (1.0 + std::abs(zeta)));
}

TEST_CASE("unit poisson driver gives the quarter-circle square law") {
  FreeLawOptions opt;
  opt.grid_points = 401;
  FreeLaw law(make_law("poisson", {{"rate", "1"}}), opt);
  CHECK(!law.point_mass().has_value());

  for (double x : {0.5, 1.0, 2.0, 3.5})
    CHECK(std::abs(law.density(x) - marchenko_pastur_density(x)) <= 1e-3);
  CHECK(std::abs(law.cdf(2.0) - marchenko_pastur_cdf(2.0)) <= 2e-3);

  auto [lo, hi] = law.support();
  CHECK(std::abs(lo) <= 0.08);
  CHECK(hi == doctest::Approx(4.0).epsilon(0.03));

  for (std::complex<double> zeta :
       {std::complex<double>(1.0, 0.01), std::complex<double>(3.0, 1e-3)})
    CHECK(residual(law, zeta) <= 1e-10 * (1.0 + std::abs(zeta)));

  const auto& grid = law.grid();
  CHECK(grid.x.size() == 401);
  for (std::size_t i = 0; i < grid.x.size(); ++i) {
    CHECK(grid.density[i] >= 0.0);
    if (i) CHECK(grid.cdf[i] >= grid.cdf[i - 1]);
  }
  CHECK(grid.cdf.back() == doctest::Approx(1.0 - grid.escaped).epsilon(1e-6));
}

TEST_CASE("pure shifts are point masses") {
  FreeLaw law(make_law("delta", {{"shift", "0.7"}}));
  REQUIRE(law.point_mass().has_value());
  CHECK(*law.point_mass() == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(law.cdf(0.69) == doctest::Approx(0.0));
  CHECK(law.cdf(0.71) == doctest::Approx(1.0));
}

TEST_CASE("panel discretization tracks the exact functional") {
  FreeLaw law(make_law("gamma"));
  CHECK(std::abs(law.free_cumulant({0.0, 0.0})) <= 1e-14);
  for (std::complex<double> z : {std::complex<double>(0.3, 0.2),
                                 std::complex<double>(-0.5, 0.4),
                                 std::complex<double>(0.0, -1.0)}) {
    std::complex<double> exact = law.free_cumulant(z);
    std::complex<double> fast = law.free_cumulant_fast(z);
    CHECK(std::abs(exact - fast) <= 1e-5 * (1.0 + std::abs(exact)));
  }
}
