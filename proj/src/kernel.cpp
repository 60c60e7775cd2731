#include "fid/kernel.hpp"

#include <cmath>
#include <numbers>

#include "fid/util/error.hpp"
#include "fid/util/quad.hpp"
#include "fid/util/roots.hpp"
#include "fid/util/special.hpp"

namespace fid {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kEulerGamma = 0.5772156649015329;
}  // namespace

struct Kernel::Impl {
  std::string name;
  double T = kInf;
  Monotonicity mono = Monotonicity::Decreasing;
  double hmax = kInf;
  DriverCondition cond = DriverCondition::AnyID;
  std::function<double(double)> eval;
  std::function<double(double)> inv;      // h^{-1}(y), clamped
  std::function<double(double)> tabove;   // Leb{h > w}
  std::function<double(double)> tderiv;   // |d/dw tabove|
  std::vector<double> kinks;
  double ih = 0.0, ih2 = 0.0;
  std::function<double(double)> ih_upto;
  std::function<double(double)> ih2_upto;
  std::function<double(double)> h2above;
  std::function<double(double, double, double)> horizon_fn;  // optional override
};

namespace {

using ImplPtr = std::shared_ptr<Kernel::Impl>;

// Monotone inversion in log space; robust when the root spans many decades.
double invert_log_space(const std::function<double(double)>& fwd, double y,
                        double slo, double shi,
                        const std::function<double(double)>& dfds) {
  auto F = [&](double u) { return fwd(std::exp(u)); };
  InvertOptions opt;
  opt.deriv = [&](double u) {
    double s = std::exp(u);
    return dfds(s) * s;
  };
  return std::exp(invert_monotone(F, y, std::log(slo), std::log(shi), opt));
}

// int_s^inf phi(u)/u du expressed through the exponential integral.
double phi_over_t_tail(double s) {
  double x = 0.5 * s * s;
  if (x < 1e-300) return (-kEulerGamma - std::log(x)) * 0.5 * kInvSqrt2Pi;
  if (x > 700.0) return 0.0;
  return expint_e1(x) * 0.5 * kInvSqrt2Pi;
}

ImplPtr ou_exp_impl() {
  auto k = std::make_shared<Kernel::Impl>();
  k->name = "ou_exp";
  k->T = kInf;
  k->mono = Monotonicity::Decreasing;
  k->hmax = 1.0;
  k->cond = DriverCondition::ILog;
  k->eval = [](double t) { return t < 0.0 ? 0.0 : std::exp(-t); };
  k->inv = [](double y) {
    if (y >= 1.0) return 0.0;
    if (y <= 0.0) return kInf;
    return -std::log(y);
  };
  k->tabove = k->inv;
  k->tderiv = [](double w) { return (w > 0.0 && w < 1.0) ? 1.0 / w : 0.0; };
  k->ih = 1.0;
  k->ih2 = 0.5;
  k->ih_upto = [](double T) { return T <= 0.0 ? 0.0 : 1.0 - std::exp(-T); };
  k->ih2_upto = [](double T) { return T <= 0.0 ? 0.0 : 0.5 * (1.0 - std::exp(-2.0 * T)); };
  k->h2above = [](double w) {
    if (w >= 1.0) return 0.0;
    if (w <= 0.0) return 0.5;
    return 0.5 * (1.0 - w * w);
  };
  return k;
}

ImplPtr linear_t_impl() {
  auto k = std::make_shared<Kernel::Impl>();
  k->name = "linear_t";
  k->T = 1.0;
  k->mono = Monotonicity::Increasing;
  k->hmax = 1.0;
  k->eval = [](double t) { return (t >= 0.0 && t <= 1.0) ? t : 0.0; };
  k->inv = [](double y) { return std::clamp(y, 0.0, 1.0); };
  k->tabove = [](double w) {
    if (w >= 1.0) return 0.0;
    if (w <= 0.0) return 1.0;
    return 1.0 - w;
  };
  k->tderiv = [](double w) { return (w > 0.0 && w < 1.0) ? 1.0 : 0.0; };
  k->ih = 0.5;
  k->ih2 = 1.0 / 3.0;
  k->ih_upto = [](double T) {
    double c = std::clamp(T, 0.0, 1.0);
    return 0.5 * c * c;
  };
  k->ih2_upto = [](double T) {
    double c = std::clamp(T, 0.0, 1.0);
    return c * c * c / 3.0;
  };
  k->h2above = [](double w) {
    if (w >= 1.0) return 0.0;
    if (w <= 0.0) return 1.0 / 3.0;
    return (1.0 - w * w * w) / 3.0;
  };
  return k;
}

ImplPtr log_inv_impl() {
  auto k = std::make_shared<Kernel::Impl>();
  k->name = "log_inv";
  k->T = 1.0;
  k->mono = Monotonicity::Decreasing;
  k->hmax = kInf;
  k->eval = [](double t) {
    if (t <= 0.0) return kInf;
    if (t >= 1.0) return 0.0;
    return -std::log(t);
  };
  k->inv = [](double y) { return y <= 0.0 ? 1.0 : std::exp(-y); };
  k->tabove = k->inv;
  k->tderiv = [](double w) { return w > 0.0 ? std::exp(-w) : 0.0; };
  k->ih = 1.0;
  k->ih2 = 2.0;
  k->ih_upto = [](double T) {
    double c = std::clamp(T, 0.0, 1.0);
    return c <= 0.0 ? 0.0 : c * (1.0 - std::log(c));
  };
  k->ih2_upto = [](double T) {
    double c = std::clamp(T, 0.0, 1.0);
    if (c <= 0.0) return 0.0;
    double l = std::log(c);
    return c * (l * l - 2.0 * l + 2.0);
  };
  k->h2above = [](double w) {
    if (w <= 0.0) return 2.0;
    return std::exp(-w) * (w * w + 2.0 * w + 2.0);
  };
  return k;
}

ImplPtr cos_arc_impl() {
  auto k = std::make_shared<Kernel::Impl>();
  k->name = "cos_arc";
  k->T = 1.0;
  k->mono = Monotonicity::Decreasing;
  k->hmax = 1.0;
  k->eval = [](double t) {
    return (t >= 0.0 && t <= 1.0) ? std::cos(kPi * t / 2.0) : 0.0;
  };
  k->inv = [](double y) {
    if (y >= 1.0) return 0.0;
    if (y <= 0.0) return 1.0;
    return 2.0 / kPi * std::acos(y);
  };
  k->tabove = k->inv;
  k->tderiv = [](double w) {
    if (w <= 0.0 || w >= 1.0) return 0.0;
    // (1 - w)(1 + w) avoids the cancellation of 1 - w^2 near the top level.
    return 2.0 / kPi / std::sqrt((1.0 - w) * (1.0 + w));
  };
  k->ih = 2.0 / kPi;
  k->ih2 = 0.5;
  k->ih_upto = [](double T) {
    double c = std::clamp(T, 0.0, 1.0);
    return 2.0 / kPi * std::sin(kPi * c / 2.0);
  };
  k->ih2_upto = [](double T) {
    double c = std::clamp(T, 0.0, 1.0);
    return 0.5 * c + std::sin(kPi * c) / (2.0 * kPi);
  };
  k->h2above = [](double w) {
    if (w >= 1.0) return 0.0;
    if (w <= 0.0) return 0.5;
    double tw = 2.0 / kPi * std::acos(w);
    return 0.5 * tw + w * std::sqrt(1.0 - w * w) / kPi;
  };
  return k;
}

ImplPtr sqrtlog_impl(bool half) {
  auto k = std::make_shared<Kernel::Impl>();
  k->name = half ? "sqrtlog_half" : "sqrtlog_one";
  k->T = half ? 0.5 : 1.0;
  k->mono = Monotonicity::Decreasing;
  k->hmax = kInf;
  double Tend = k->T;
  double wmin = half ? std::sqrt(std::log(2.0)) : 0.0;
  k->eval = [Tend](double t) {
    if (t <= 0.0) return kInf;
    if (t >= Tend) return 0.0;
    return std::sqrt(-std::log(t));
  };
  k->inv = [Tend, wmin](double y) {
    if (y <= wmin) return Tend;
    return std::exp(-y * y);
  };
  k->tabove = k->inv;
  k->tderiv = [wmin](double w) {
    if (w <= wmin || w <= 0.0) return 0.0;
    return 2.0 * w * std::exp(-w * w);
  };
  if (half) k->kinks = {wmin};
  k->ih = gamma_upper(1.5, half ? std::log(2.0) : 0.0);
  k->ih2 = half ? 0.5 * (1.0 + std::log(2.0)) : 1.0;
  k->ih_upto = [Tend](double T) {
    double c = std::clamp(T, 0.0, Tend);
    if (c <= 0.0) return 0.0;
    return gamma_upper(1.5, -std::log(c));
  };
  k->ih2_upto = [Tend](double T) {
    double c = std::clamp(T, 0.0, Tend);
    if (c <= 0.0) return 0.0;
    return c * (1.0 - std::log(c));
  };
  double full2 = k->ih2;
  k->h2above = [wmin, full2](double w) {
    if (w <= wmin) return full2;
    return std::exp(-w * w) * (1.0 + w * w);
  };
  return k;
}

ImplPtr e1_inv_impl() {
  auto k = std::make_shared<Kernel::Impl>();
  k->name = "e1_inv";
  k->T = kInf;
  k->mono = Monotonicity::Decreasing;
  k->hmax = kInf;
  k->cond = DriverCondition::ILog;
  k->eval = [](double t) {
    if (t <= 0.0) return kInf;
    if (t >= 690.0) return 1e-300;
    return invert_log_space([](double s) { return expint_e1(s); }, t, 1e-300, 746.0,
                            [](double s) { return -std::exp(-s) / s; });
  };
  k->inv = [](double y) { return y <= 0.0 ? kInf : expint_e1(y); };
  k->tabove = k->inv;
  k->tderiv = [](double w) { return w > 0.0 ? std::exp(-w) / w : 0.0; };
  k->ih = 1.0;
  k->ih2 = 1.0;
  auto eval = k->eval;
  k->ih_upto = [eval](double T) {
    if (T <= 0.0) return 0.0;
    double s = eval(T);
    return s == kInf ? 0.0 : std::exp(-s);
  };
  k->ih2_upto = [eval](double T) {
    if (T <= 0.0) return 0.0;
    double s = eval(T);
    return s == kInf ? 0.0 : (1.0 + s) * std::exp(-s);
  };
  k->h2above = [](double w) {
    if (w <= 0.0) return 1.0;
    return (1.0 + w) * std::exp(-w);
  };
  return k;
}

ImplPtr normal_tail_inv_impl() {
  auto k = std::make_shared<Kernel::Impl>();
  k->name = "normal_tail_inv";
  k->T = 0.5;
  k->mono = Monotonicity::Decreasing;
  k->hmax = kInf;
  k->cond = DriverCondition::Symmetric;
  k->eval = [](double y) {
    if (y >= 0.5) return 0.0;
    if (y <= 1e-300) return 38.0;  // clamp: the tail underflows beyond here
    InvertOptions opt;
    opt.deriv = [](double s) { return -normal_pdf(s); };
    return invert_monotone([](double s) { return normal_upper(s); }, y, 0.0, 38.0, opt);
  };
  k->inv = [](double w) { return w <= 0.0 ? 0.5 : normal_upper(w); };
  k->tabove = k->inv;
  k->tderiv = [](double w) { return w > 0.0 ? normal_pdf(w) : 0.0; };
  k->ih = kInvSqrt2Pi;
  k->ih2 = 0.5;
  auto eval = k->eval;
  k->ih_upto = [eval](double T) {
    double c = std::clamp(T, 0.0, 0.5);
    if (c <= 0.0) return 0.0;
    return normal_pdf(eval(c));
  };
  k->ih2_upto = [eval](double T) {
    double c = std::clamp(T, 0.0, 0.5);
    if (c <= 0.0) return 0.0;
    double s = eval(c);
    return s * normal_pdf(s) + normal_upper(s);
  };
  k->h2above = [](double w) {
    if (w <= 0.0) return 0.5;
    return w * normal_pdf(w) + normal_upper(w);
  };
  return k;
}

ImplPtr phi_over_t_inv_impl() {
  auto k = std::make_shared<Kernel::Impl>();
  k->name = "phi_over_t_inv";
  k->T = kInf;
  k->mono = Monotonicity::Decreasing;
  k->hmax = kInf;
  k->cond = DriverCondition::SymmetricILog;
  k->eval = [](double t) {
    if (t <= 0.0) return kInf;
    if (t >= phi_over_t_tail(1e-12)) return 1e-12;
    if (t <= phi_over_t_tail(50.0)) return 50.0;
    return invert_log_space(phi_over_t_tail, t, 1e-12, 50.0,
                            [](double s) { return -normal_pdf(s) / s; });
  };
  k->inv = [](double w) { return w <= 0.0 ? kInf : phi_over_t_tail(w); };
  k->tabove = k->inv;
  k->tderiv = [](double w) { return w > 0.0 ? normal_pdf(w) / w : 0.0; };
  k->ih = 0.5;
  k->ih2 = kInvSqrt2Pi;
  auto eval = k->eval;
  k->ih_upto = [eval](double T) {
    if (T <= 0.0) return 0.0;
    double s = eval(T);
    return s == kInf ? 0.0 : normal_upper(s);
  };
  k->ih2_upto = [eval](double T) {
    if (T <= 0.0) return 0.0;
    double s = eval(T);
    return s == kInf ? 0.0 : normal_pdf(s);
  };
  k->h2above = [](double w) {
    if (w <= 0.0) return kInvSqrt2Pi;
    return normal_pdf(w);
  };
  return k;
}

ImplPtr const_impl(double c, double len) {
  if (!(c > 0.0) || !(len > 0.0))
    throw Error(errc::invalid_config, "constant kernel needs c > 0 and len > 0");
  auto k = std::make_shared<Kernel::Impl>();
  k->name = "const";
  k->T = len;
  k->mono = Monotonicity::Constant;
  k->hmax = c;
  k->eval = [c, len](double t) { return (t >= 0.0 && t < len) ? c : 0.0; };
  k->tabove = [c, len](double w) { return w < c ? len : 0.0; };
  k->tderiv = [](double) { return 0.0; };  // the level occupation jumps at c
  k->kinks = {c};
  k->ih = c * len;
  k->ih2 = c * c * len;
  k->ih_upto = [c, len](double T) { return c * std::clamp(T, 0.0, len); };
  k->ih2_upto = [c, len](double T) { return c * c * std::clamp(T, 0.0, len); };
  k->h2above = [c, len](double w) { return w < c ? c * c * len : 0.0; };
  return k;
}

double generic_horizon(const Kernel::Impl& k, double tol, double xbar, double eps) {
  if (k.T < kInf) return k.T;
  double w_eps = kInf;
  if (xbar > 0.0 && eps > 0.0) w_eps = eps / xbar;
  auto dropped = [&](double w) { return k.ih2 - k.h2above(w); };
  double w_tol = 1e9;
  if (tol > 0.0 && dropped(w_tol) > tol) {
    double lo = 1e-12, hi = w_tol;
    if (dropped(lo) > tol) {
      w_tol = lo;
    } else {
      for (int i = 0; i < 100; ++i) {
        double mid = std::sqrt(lo * hi);
        (dropped(mid) <= tol ? lo : hi) = mid;
      }
      w_tol = lo;
    }
  }
  double wstar = std::min(w_eps, w_tol);
  if (!(wstar > 0.0) || wstar == kInf) wstar = 1.0;
  return k.tabove(wstar);
}

}  // namespace

const std::string& Kernel::name() const { return impl_->name; }
double Kernel::support_end() const { return impl_->T; }
double Kernel::operator()(double t) const { return impl_->eval(t); }
Monotonicity Kernel::monotonicity() const { return impl_->mono; }
double Kernel::h_max() const { return impl_->hmax; }
bool Kernel::needs_ilog() const { return impl_->T == kInf; }
double Kernel::int_h() const { return impl_->ih; }
double Kernel::int_h2() const { return impl_->ih2; }
DriverCondition Kernel::driver_condition() const { return impl_->cond; }

double Kernel::int_h_upto(double T) const {
  if (impl_->ih_upto) return impl_->ih_upto(T);
  throw Error(errc::not_monotone, "kernel '" + impl_->name + "' has no moment closure");
}

double Kernel::int_h2_upto(double T) const {
  if (impl_->ih2_upto) return impl_->ih2_upto(T);
  throw Error(errc::not_monotone, "kernel '" + impl_->name + "' has no moment closure");
}

double Kernel::time_above(double w) const {
  if (!impl_->tabove)
    throw Error(errc::not_monotone,
                "kernel '" + impl_->name + "' has no occupation machinery");
  return impl_->tabove(w);
}

double Kernel::time_above_deriv(double w) const {
  if (!impl_->tderiv)
    throw Error(errc::not_monotone,
                "kernel '" + impl_->name + "' has no occupation machinery");
  return impl_->tderiv(w);
}

const std::vector<double>& Kernel::level_kinks() const { return impl_->kinks; }

double Kernel::inverse(double y) const {
  if (!impl_->inv)
    throw Error(errc::not_monotone, "kernel '" + impl_->name + "' is not invertible");
  return impl_->inv(y);
}

double Kernel::h2_above(double w) const {
  if (!impl_->h2above)
    throw Error(errc::not_monotone,
                "kernel '" + impl_->name + "' has no occupation machinery");
  return impl_->h2above(w);
}

double Kernel::horizon(double tol, double xbar, double eps) const {
  if (impl_->horizon_fn) return impl_->horizon_fn(tol, xbar, eps);
  return generic_horizon(*impl_, tol, xbar, eps);
}

Kernel make_kernel(const std::string& name, const Params& params) {
  auto done = [&](ImplPtr p) { return Kernel(std::move(p)); };
  if (name == "ou_exp") return done(ou_exp_impl());
  if (name == "linear_t") return done(linear_t_impl());
  if (name == "log_inv") return done(log_inv_impl());
  if (name == "cos_arc") return done(cos_arc_impl());
  if (name == "sqrtlog_one") return done(sqrtlog_impl(false));
  if (name == "sqrtlog_half") return done(sqrtlog_impl(true));
  if (name == "e1_inv") return done(e1_inv_impl());
  if (name == "normal_tail_inv") return done(normal_tail_inv_impl());
  if (name == "phi_over_t_inv") return done(phi_over_t_inv_impl());
  if (name == "const")
    return done(const_impl(param_double(params, "c", 1.0),
                           param_double(params, "len", 1.0)));
  throw Error(errc::unknown_name, "unknown kernel: " + name);
}

std::vector<std::string> kernel_names() {
  return {"ou_exp",      "linear_t",       "log_inv",        "cos_arc", "sqrtlog_one",
          "sqrtlog_half", "e1_inv", "normal_tail_inv", "phi_over_t_inv", "const"};
}

Kernel make_custom_kernel(std::string name, std::function<double(double)> h,
                          double support_end) {
  auto k = std::make_shared<Kernel::Impl>();
  k->name = std::move(name);
  k->T = support_end;
  k->mono = Monotonicity::None;
  k->hmax = kInf;
  k->eval = std::move(h);
  auto eval = k->eval;
  double T = k->T;
  // Moments by quadrature; doubling partial sums on an infinite horizon with
  // a growth test mirroring the log-tail check.
  auto accumulate = [eval, T](const std::function<double(double)>& w) {
    if (T < kInf) return quad::finite([&](double t) { return w(eval(t)); }, 0.0, T);
    double total = quad::finite([&](double t) { return w(eval(t)); }, 0.0, 1.0);
    double lo = 1.0;
    for (int i = 0; i <= 40; ++i) {
      double inc = quad::finite([&](double t) { return w(eval(t)); }, lo, 2.0 * lo);
      total += inc;
      if (inc < 1e-9) return total;
      lo *= 2.0;
    }
    throw Error(errc::divergent_integral,
                "custom kernel moment integral did not stabilize");
  };
  // Validity: log(1 + h) must be integrable over the support.
  accumulate([](double v) { return std::log1p(std::fabs(v)); });
  k->ih = accumulate([](double v) { return v; });
  k->ih2 = accumulate([](double v) { return v * v; });
  k->ih_upto = [eval, T](double up) {
    double b = std::min(up, T);
    if (b <= 0.0) return 0.0;
    return quad::finite([&](double t) { return eval(t); }, 0.0, b);
  };
  k->ih2_upto = [eval, T](double up) {
    double b = std::min(up, T);
    if (b <= 0.0) return 0.0;
    return quad::finite([&](double t) { return eval(t) * eval(t); }, 0.0, b);
  };
  double full2 = k->ih2;
  auto ih2_upto = k->ih2_upto;
  k->horizon_fn = [T, full2, ih2_upto](double tol, double, double) {
    if (T < kInf) return T;
    double up = 1.0;
    for (int i = 0; i < 60; ++i) {
      if (full2 - ih2_upto(up) <= tol) return up;
      up *= 2.0;
    }
    throw Error(errc::divergent_integral, "no finite horizon reaches the tolerance");
  };
  return Kernel(std::move(k));
}

std::vector<ClassRow> class_catalog() {
  return {
      {"ggc", "custom", "any integrable h(t) >= 0", "gamma-law driver"},
      {"thorin", "e1_inv", "h = inverse of t -> int_t^inf e^{-s}/s ds",
       "requires I_log"},
      {"bondesson", "log_inv", "h(t)=log(1/t) on (0,1]",
       "any infinitely divisible driver"},
      {"thorin_alt", "log_inv", "h(t)=log(1/t) on (0,1]", "selfdecomposable driver"},
      {"selfdecomposable", "ou_exp", "h(t)=e^{-t}", "requires I_log"},
      {"type_g", "normal_tail_inv", "h = inverse of the normal upper tail, on (0,1/2)",
       "symmetric driver"},
      {"m_class", "phi_over_t_inv", "h = inverse of t -> int_t^inf phi(u)/u du",
       "symmetric driver, requires I_log"},
      {"jurek", "linear_t", "h(t)=t on [0,1]", "any infinitely divisible driver"},
      {"a_class", "cos_arc", "h(t)=cos(pi t/2) on [0,1]",
       "any infinitely divisible driver"},
      {"type_g_alt", "sqrtlog_half", "h(t)=sqrt(log(1/t)) on (0,1/2)",
       "driver from the arcsine-sprayed family"},
      {"gen_type_g", "sqrtlog_one", "h(t)=sqrt(log(1/t)) on (0,1)",
       "driver from the arcsine-sprayed family"},
  };
}

}  // namespace fid
