#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gcpd/rng.hpp"

namespace gcpd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Lower Cholesky factor L with L·Lᵀ = m.
///
/// Throws NotPositiveDefinite when a pivot falls to 1e-12 × max|diag| or below,
/// and InvalidArgument when m is not square or not symmetric to 1e-10 relative.
Matrix cholesky(const Matrix& m);

/// n rows of i.i.d. N(0, chol·cholᵀ) draws. Advances rng.
Matrix sample_mvn(const Matrix& chol, std::size_t n, Rng& rng);

double standard_normal(Rng& rng);

/// Regularized lower incomplete gamma P(k/2, x/2).
double chisq_cdf(double x, int k);

double chisq_sample(int k, Rng& rng);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Asymptotic Kolmogorov survival function Q(λ) = 2 Σ (-1)^{j-1} exp(-2 j² λ²).
double kolmogorov_survival(double lambda);

/// One-sample Kolmogorov-Smirnov test. The sample is sorted internally.
KsResult ks_test(std::span<const double> sample,
                 const std::function<double(double)>& cdf);

/// Least squares of y on the columns of x listed in `support`; zero elsewhere.
/// Throws SingularDesign when the restricted Gram matrix is not positive definite.
Vector ols_on_support(const Matrix& x, const Vector& y,
                      std::span<const int> support);

/// Same solve expressed through second moments: gram = XᵀX (any common scale),
/// rhs = Xᵀy on the same scale.
Vector ols_from_gram(const Matrix& gram, const Vector& rhs,
                     std::span<const int> support);

/// Second-moment matrix (1/n)·Σ rows rᵢ rᵢᵀ over rows [begin, end).
Matrix segment_moments(const Matrix& z, int begin, int end);

/// Covariance over rows [begin, end) with means removed, divided by the row count.
Matrix segment_covariance(const Matrix& z, int begin, int end);

/// ⌊T·τ⌋, tolerant of representation error in τ.
int split_index(int T, double tau);

}  // namespace gcpd
