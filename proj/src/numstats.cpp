#include "gcpd/numstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "gcpd/error.hpp"

namespace gcpd {

Matrix cholesky(const Matrix& m) {
  require(m.rows() == m.cols() && m.rows() >= 1, "cholesky: matrix must be square");
  const Eigen::Index n = m.rows();
  const double scale = std::max(m.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-10 * scale)
        fail(ErrorKind::InvalidArgument, "cholesky: matrix is not symmetric");

  const double floor = 1e-12 * m.diagonal().cwiseAbs().maxCoeff();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > floor))
      fail(ErrorKind::NotPositiveDefinite,
           "cholesky: pivot " + std::to_string(j) + " is not positive");
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i)
      l(i, j) = (m(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / d;
  }
  return l;
}

double standard_normal(Rng& rng) {
  // Marsaglia polar method without caching, so each call is self-contained.
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

Matrix sample_mvn(const Matrix& chol, std::size_t n, Rng& rng) {
  require(chol.rows() == chol.cols(), "sample_mvn: factor must be square");
  const Eigen::Index p = chol.rows();
  Matrix g(static_cast<Eigen::Index>(n), p);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < p; ++j) g(i, j) = standard_normal(rng);
  return g * chol.transpose().triangularView<Eigen::Upper>().toDenseMatrix();
}

double chisq_cdf(double x, int k) {
  require(k >= 1, "chisq_cdf: degrees of freedom must be positive");
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(0.5 * k, 0.5 * x);
}

double chisq_sample(int k, Rng& rng) {
  require(k >= 1, "chisq_sample: degrees of freedom must be positive");
  std::gamma_distribution<double> gamma(0.5 * k, 2.0);
  return gamma(rng);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double q;
  if (lambda < 1.0) {
    // Jacobi theta form of the same function; the alternating series
    // converges too slowly here.
    const double pi2_8 = M_PI * M_PI / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int j = 1; j < 100; ++j) {
      const double term = std::exp(-(2.0 * j - 1.0) * (2.0 * j - 1.0) * pi2_8);
      sum += term;
      if (term < 1e-16) break;
    }
    q = 1.0 - std::sqrt(2.0 * M_PI) / lambda * sum;
  } else {
    double sum = 0.0;
    for (int j = 1; j < 1000; ++j) {
      const double term = std::exp(-2.0 * j * j * lambda * lambda);
      sum += (j % 2 == 1) ? term : -term;
      if (term < 1e-10) break;
    }
    q = 2.0 * sum;
  }
  return std::clamp(q, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> sample,
                 const std::function<double(double)>& cdf) {
  if (sample.empty()) fail(ErrorKind::EmptySample, "ks_test: empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, std::abs((i + 1) / n - f), std::abs(i / n - f)});
  }
  const double root_n = std::sqrt(n);
  KsResult out;
  out.statistic = std::clamp(d, 0.0, 1.0);
  out.p_value = kolmogorov_survival(d * (root_n + 0.12 + 0.11 / root_n));
  out.n = x.size();
  return out;
}

Vector ols_from_gram(const Matrix& gram, const Vector& rhs,
                     std::span<const int> support) {
  Vector beta = Vector::Zero(gram.cols());
  if (support.empty()) return beta;
  const auto s = static_cast<Eigen::Index>(support.size());
  Matrix g(s, s);
  Vector b(s);
  for (Eigen::Index a = 0; a < s; ++a) {
    b(a) = rhs(support[a]);
    for (Eigen::Index c = 0; c < s; ++c) g(a, c) = gram(support[a], support[c]);
  }
  Matrix l;
  try {
    l = cholesky(g);
  } catch (const Error& e) {
    fail(ErrorKind::SingularDesign, std::string("ols: restricted design is singular (") + e.what() + ")");
  }
  const Vector w = l.triangularView<Eigen::Lower>().solve(b);
  const Vector coef = l.transpose().triangularView<Eigen::Upper>().solve(w);
  for (Eigen::Index a = 0; a < s; ++a) beta(support[a]) = coef(a);
  return beta;
}

Vector ols_on_support(const Matrix& x, const Vector& y,
                      std::span<const int> support) {
  if (x.rows() != y.size()) fail(ErrorKind::DimensionMismatch, "ols: rows of x and y differ");
  require(static_cast<Eigen::Index>(support.size()) <= x.rows(),
          "ols: support larger than the number of rows");
  for (int k : support) require(k >= 0 && k < x.cols(), "ols: support index out of range");
  return ols_from_gram(x.transpose() * x, x.transpose() * y, support);
}

Matrix segment_moments(const Matrix& z, int begin, int end) {
  require(0 <= begin && begin < end && end <= z.rows(), "segment_moments: bad row range");
  const auto seg = z.middleRows(begin, end - begin);
  Matrix s = Matrix::Zero(z.cols(), z.cols());
  s.selfadjointView<Eigen::Lower>().rankUpdate(seg.transpose());
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return s / static_cast<double>(end - begin);
}

Matrix segment_covariance(const Matrix& z, int begin, int end) {
  require(0 <= begin && begin < end && end <= z.rows(), "segment_covariance: bad row range");
  const auto seg = z.middleRows(begin, end - begin);
  const Eigen::RowVectorXd mean = seg.colwise().mean();
  const Matrix centered = seg.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(end - begin);
}

int split_index(int T, double tau) {
  return static_cast<int>(std::floor(static_cast<double>(T) * tau + 1e-9));
}

}  // namespace gcpd
