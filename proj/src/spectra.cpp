#include "fid/spectra.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "fid/util/error.hpp"

namespace fid {

std::vector<double> hermitian_eigenvalues(const Mat& m) {
  const int d = static_cast<int>(m.rows());
  if (d == 0 || m.cols() != d)
    throw Error(errc::non_hermitian, "matrix must be square and nonempty");
  const double scale = std::max(1.0, m.norm());
  if ((m - m.adjoint()).norm() > 1e-12 * scale)
    throw Error(errc::non_hermitian, "matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> solver(m, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw Error(errc::non_hermitian, "eigendecomposition failed");
  std::vector<double> eig(d);
  for (int i = 0; i < d; ++i) eig[i] = solver.eigenvalues()[i];
  for (int idx : {0, d / 2, d - 1}) {
    const Vec v = solver.eigenvectors().col(idx);
    const double resid = (m * v - eig[idx] * v).norm();
    if (resid > 1e-8 * (scale + std::abs(eig[idx])))
      throw Error(errc::non_hermitian, "eigenpair residual too large");
  }
  double tr = 0.0;
  for (int i = 0; i < d; ++i) tr += m(i, i).real();
  double sum = 0.0;
  for (double e : eig) sum += e;
  if (std::abs(sum - tr) > 1e-8 * (1.0 + std::abs(tr)))
    throw Error(errc::non_hermitian, "eigenvalue sum disagrees with the trace");
  return eig;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : xs_(std::move(values)) {
  if (xs_.empty()) throw Error(errc::degenerate_set, "empty sample");
  for (double x : xs_)
    if (!std::isfinite(x))
      throw Error(errc::degenerate_set, "sample contains a non-finite value");
  std::sort(xs_.begin(), xs_.end());
}

double EmpiricalCdf::operator()(double x) const {
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  return static_cast<double>(it - xs_.begin()) / xs_.size();
}

double ks_distance(const EmpiricalCdf& emp, const std::function<double(double)>& cdf) {
  const auto& xs = emp.sorted();
  const double n = static_cast<double>(xs.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    sup = std::max(sup, std::abs(f - (i + 1) / n));
    sup = std::max(sup, std::abs(f - i / n));
  }
  return sup;
}

double ks_two_sample(const EmpiricalCdf& a, const EmpiricalCdf& b) {
  const auto& xa = a.sorted();
  const auto& xb = b.sorted();
  double sup = 0.0;
  std::size_t i = 0, j = 0;
  while (i < xa.size() || j < xb.size()) {
    double x;
    if (j >= xb.size() || (i < xa.size() && xa[i] <= xb[j]))
      x = xa[i];
    else
      x = xb[j];
    while (i < xa.size() && xa[i] <= x) ++i;
    while (j < xb.size() && xb[j] <= x) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / xa.size() -
                                 static_cast<double>(j) / xb.size()));
  }
  return sup;
}

double wasserstein1(const EmpiricalCdf& emp, const std::function<double(double)>& cdf,
                    double lo, double hi) {
  if (!(lo < hi)) throw Error(errc::invalid_config, "empty integration window");
  std::vector<double> grid{lo};
  for (double x : emp.sorted())
    if (x > lo && x < hi) grid.push_back(x);
  grid.push_back(hi);
  double acc = 0.0;
  auto gap = [&](double x) { return std::abs(emp(x) - cdf(x)); };
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i], b = grid[i + 1];
    if (!(b > a)) continue;
    // five-point trapezoid per cell; F_n is constant strictly inside
    double prev_x = a, prev_v = gap(a);
    for (int k = 1; k <= 4; ++k) {
      const double x = a + (b - a) * k / 4.0;
      const double v = gap(x);
      acc += 0.5 * (prev_v + v) * (x - prev_x);
      prev_x = x;
      prev_v = v;
    }
  }
  return acc;
}

}  // namespace fid
