#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <doctest.h>

#include "fid/spectra.hpp"
#include "fid/util/error.hpp"
#include "fid/util/rng.hpp"

using namespace fid;

TEST_CASE("eigenvalues of small Hermitian matrices") {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = -1.0;
  auto eig = hermitian_eigenvalues(m);
  REQUIRE(eig.size() == 2);
  CHECK(eig[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(eig[1] == doctest::Approx(2.0).epsilon(1e-12));

  // [[0, i], [-i, 0]] has eigenvalues -1, 1
  Mat p = Mat::Zero(2, 2);
  p(0, 1) = std::complex<double>(0.0, 1.0);
  p(1, 0) = std::complex<double>(0.0, -1.0);
  auto pe = hermitian_eigenvalues(p);
  CHECK(pe[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(pe[1] == doctest::Approx(1.0).epsilon(1e-12));

  Mat bad = Mat::Zero(2, 2);
  bad(0, 1) = 0.3;  // not mirrored below the diagonal
  CHECK_THROWS_WITH_AS(hermitian_eigenvalues(bad), doctest::Contains("Hermitian"), Error);
}

TEST_CASE("empirical distribution steps") {
  EmpiricalCdf emp({3.0, 1.0, 2.0, 2.0});
  CHECK(emp.sorted().front() == 1.0);
  CHECK(emp.sorted().back() == 3.0);
  CHECK(emp(0.5) == 0.0);
  CHECK(emp(1.0) == doctest::Approx(0.25));
  CHECK(emp(1.5) == doctest::Approx(0.25));
  CHECK(emp(2.0) == doctest::Approx(0.75));
  CHECK(emp(10.0) == 1.0);
  CHECK_THROWS_AS(EmpiricalCdf({}), Error);
}

TEST_CASE("distribution distances against hand values") {
  // two points {0, 1} against the cdf of a point mass slightly left of 1
  EmpiricalCdf emp({0.0, 1.0});
  auto step = [](double x) { return x < 0.5 ? 0.0 : 1.0; };
  CHECK(ks_distance(emp, step) == doctest::Approx(0.5).epsilon(1e-12));
  // L1 area between the step at 0.5 and the two-point staircase:
  // on (0, 0.5) gap 0.5, on (0.5, 1) gap 0.5
  CHECK(wasserstein1(emp, step, -1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-6));

  // uniform(0,1) sample distance obeys the root-n law
  Rng rng = replica_stream(5, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int n = 4000;
  std::vector<double> u(n);
  for (auto& x : u) x = unit(rng);
  EmpiricalCdf ue(std::move(u));
  auto unif = [](double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); };
  CHECK(ks_distance(ue, unif) <= 1.63 / std::sqrt(double(n)));
  CHECK(ks_distance(ue, unif) > 0.0);
  CHECK(wasserstein1(ue, unif, 0.0, 1.0) <= 2.0 / std::sqrt(double(n)));
}

TEST_CASE("two-sample distance") {
  EmpiricalCdf a({1.0, 2.0, 3.0});
  CHECK(ks_two_sample(a, a) == 0.0);
  EmpiricalCdf b({1.0, 2.0, 3.0, 9.0});
  CHECK(ks_two_sample(a, b) == doctest::Approx(0.25).epsilon(1e-12));
  EmpiricalCdf c({10.0, 11.0});
  CHECK(ks_two_sample(a, c) == doctest::Approx(1.0).epsilon(1e-12));
}
