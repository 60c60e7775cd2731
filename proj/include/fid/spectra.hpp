// Spectral statistics: validated Hermitian eigendecomposition, empirical
// distribution functions, and the distances used to compare spectra against
// reference laws or each other.
#pragma once

#include <functional>
#include <vector>

#include "fid/matrix_model.hpp"

namespace fid {

// Ascending eigenvalues.  Rejects non-Hermitian input and cross-checks the
// decomposition (residuals at three probe indices, trace consistency).
std::vector<double> hermitian_eigenvalues(const Mat& m);

class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> values);
  double operator()(double x) const;
  const std::vector<double>& sorted() const { return xs_; }
  std::size_t size() const { return xs_.size(); }

 private:
  std::vector<double> xs_;
};

// sup_x |F_n(x) - F(x)| for a continuous reference CDF, exact over the jumps.
double ks_distance(const EmpiricalCdf& emp, const std::function<double(double)>& cdf);

double ks_two_sample(const EmpiricalCdf& a, const EmpiricalCdf& b);

// int |F_n - F| dx over [lo, hi] by trapezoid refinement of the jump grid.
double wasserstein1(const EmpiricalCdf& emp, const std::function<double(double)>& cdf,
                    double lo, double hi);

}  // namespace fid
