#include <cmath>
#include <numbers>

#include <doctest.h>

#include "fid/kernel.hpp"
#include "fid/checks.hpp"
#include "fid/util/error.hpp"
#include "fid/util/quad.hpp"

using namespace fid;

TEST_CASE("elementary moments") {
  CHECK(make_kernel("ou_exp").int_h() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(make_kernel("ou_exp").int_h2() == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(make_kernel("linear_t").int_h() == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(make_kernel("linear_t").int_h2() == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(make_kernel("log_inv").int_h2() == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(make_kernel("cos_arc").int_h() ==
        doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-13));
  Kernel flat = make_kernel("const", {{"c", "0.75"}, {"len", "2"}});
  CHECK(flat.int_h() == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(flat.int_h2() == doctest::Approx(1.125).epsilon(1e-13));
}

TEST_CASE("partial moments clamp at the support") {
  Kernel ou = make_kernel("ou_exp");
  CHECK(ou.int_h_upto(2.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
  CHECK(ou.int_h2_upto(2.0) == doctest::Approx(0.5 * (1.0 - std::exp(-4.0))).epsilon(1e-12));
  Kernel lin = make_kernel("linear_t");
  CHECK(lin.int_h_upto(0.5) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(lin.int_h_upto(7.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lin.int_h_upto(-1.0) == doctest::Approx(0.0));
}

TEST_CASE("occupation times of the exponential kernel") {
  Kernel ou = make_kernel("ou_exp");
  CHECK(ou.time_above(0.2) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  CHECK(ou.time_above(1.0) == doctest::Approx(0.0));
  CHECK(ou.time_above(2.0) == doctest::Approx(0.0));
  CHECK(ou.time_above_deriv(0.25) == doctest::Approx(4.0).epsilon(1e-12));
  // int over {h > w} of h^2 = (1 - w^2)/2
  CHECK(ou.h2_above(0.3) == doctest::Approx(0.5 * (1.0 - 0.09)).epsilon(1e-12));
}

TEST_CASE("horizon rule balances tail variance and drift reach") {
  Kernel ou = make_kernel("ou_exp");
  double T = ou.horizon(1e-10, 2.0, 1e-3);
  CHECK(ou.int_h2() - ou.int_h2_upto(T) <= 1e-10 * 1.0000001);
  CHECK(ou(T) * 2.0 <= 1e-3 * 1.0000001);
  // a slightly smaller horizon violates one of the two constraints
  double Tm = 0.98 * T;
  bool tight = (ou.int_h2() - ou.int_h2_upto(Tm) > 1e-10) || (ou(Tm) * 2.0 > 1e-3);
  CHECK(tight);
  CHECK(make_kernel("linear_t").horizon(1e-12, 5.0, 1e-6) == doctest::Approx(1.0));
  CHECK(make_kernel("sqrtlog_half").horizon(1e-12, 5.0, 1e-6) == doctest::Approx(0.5));
}

TEST_CASE("driver admissibility flags") {
  CHECK(make_kernel("ou_exp").needs_ilog());
  CHECK(make_kernel("e1_inv").needs_ilog());
  CHECK(make_kernel("phi_over_t_inv").needs_ilog());
  CHECK_FALSE(make_kernel("linear_t").needs_ilog());
  CHECK_FALSE(make_kernel("log_inv").needs_ilog());
  CHECK(make_kernel("ou_exp").driver_condition() == DriverCondition::ILog);
  CHECK(make_kernel("normal_tail_inv").driver_condition() == DriverCondition::Symmetric);
  CHECK(make_kernel("phi_over_t_inv").driver_condition() == DriverCondition::SymmetricILog);
  CHECK(make_kernel("linear_t").driver_condition() == DriverCondition::AnyID);
}

TEST_CASE("catalog names resolve and unknown names do not") {
  auto names = kernel_names();
  CHECK(names.size() == 10);
  for (const auto& n : names) CHECK(make_kernel(n).name() == n);
  CHECK_THROWS_WITH_AS(make_kernel("no_such_kernel"), doctest::Contains("kernel"), Error);
}

TEST_CASE("custom kernels validate and integrate by quadrature") {
  Kernel k = make_custom_kernel("decay2", [](double t) { return std::exp(-2.0 * t); }, kInf);
  CHECK(k.int_h() == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(k.int_h2() == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(k.monotonicity() == Monotonicity::None);
  double T = k.horizon(1e-8, 0.0, 0.0);
  CHECK(k.int_h2() - k.int_h2_upto(T) <= 1e-8);
  CHECK_THROWS_AS(
      make_custom_kernel("fat", [](double t) { return 1.0 / (1.0 + t); }, kInf), Error);
}

TEST_CASE("full kernel identity battery") {
  CheckReport rep = run_kernel_roundtrips();
  for (const auto& row : rep.rows) {
    INFO(row.name, " stat=", row.stat, " bound=", row.bound);
    CHECK(row.pass);
  }
  CHECK(rep.pass);
}

TEST_CASE("class catalog rows") {
  auto rows = class_catalog();
  CHECK(rows.size() == 11);
  bool self_ok = false, jurek_ok = false;
  for (const auto& r : rows) {
    if (r.id == "selfdecomposable")
      self_ok = r.h_text.find("e^{-t}") != std::string::npos &&
                r.driver.find("I_log") != std::string::npos;
    if (r.id == "jurek") jurek_ok = r.h_text.find("t on [0,1]") != std::string::npos;
    CHECK_FALSE(r.kernel.empty());
  }
  CHECK(self_ok);
  CHECK(jurek_ok);
}
