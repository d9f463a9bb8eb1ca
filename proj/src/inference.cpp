#include "gcpd/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gcpd/error.hpp"

namespace gcpd {

std::string to_string(Regime regime) {
  return regime == Regime::Vanishing ? "Vanishing" : "NonVanishing";
}

Regime regime_from_string(const std::string& name) {
  if (name == "Vanishing" || name == "vanishing") return Regime::Vanishing;
  if (name == "NonVanishing" || name == "nonvanishing") return Regime::NonVanishing;
  fail(ErrorKind::InvalidArgument, "unknown regime '" + name + "'");
}

namespace {

void check_segments(const Matrix& z, int k, const char* who) {
  if (k < 1 || k > z.rows() - 1)
    fail(ErrorKind::SegmentTooShort, std::string(who) + ": split index leaves an empty segment");
}

void check_family(const Matrix& z, const EdgeEstimates& e, const char* who) {
  if (e.dimension() != z.cols())
    fail(ErrorKind::DimensionMismatch, std::string(who) + ": estimates do not match the data");
}

/// p×p matrix whose column j is the length-p embedding of vectors[j].
Matrix embed_columns(const std::vector<Vector>& vectors) {
  const int p = static_cast<int>(vectors.size());
  Matrix m = Matrix::Zero(p, p);
  for (int j = 0; j < p; ++j)
    for (int pos = 0; pos < p - 1; ++pos) m(column_of(j, pos), j) = vectors[j](pos);
  return m;
}

EdgeEstimates refit_segment(const Matrix& moments, int rows, const EdgeEstimates& lasso,
                            std::vector<int>& fallback) {
  const int p = lasso.dimension();
  EdgeEstimates out = lasso;
  for (int j = 0; j < p; ++j) {
    const auto& support = lasso.supports[j];
    if (static_cast<int>(support.size()) > rows - 1) {
      fallback.push_back(j);
      continue;
    }
    try {
      const Vector full = ols_from_gram(moments, moments.col(j), support);
      Vector reduced(p - 1);
      for (int pos = 0; pos < p - 1; ++pos) reduced(pos) = full(column_of(j, pos));
      out.coefficients[j] = reduced;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularDesign) throw;
      fallback.push_back(j);
    }
  }
  out.refresh_supports();
  return out;
}

}  // namespace

RefitResult refit(const Matrix& z, int k, const EdgeEstimates& mu_hat,
                  const EdgeEstimates& gamma_hat) {
  check_segments(z, k, "refit");
  check_family(z, mu_hat, "refit");
  check_family(z, gamma_hat, "refit");
  const int T = static_cast<int>(z.rows());
  RefitResult out;
  out.mu = refit_segment(segment_moments(z, 0, k), k, mu_hat, out.fallback_mu);
  out.gamma = refit_segment(segment_moments(z, k, T), T - k, gamma_hat, out.fallback_gamma);
  out.mu.tau_used = out.gamma.tau_used = static_cast<double>(k) / T;
  return out;
}

JumpStats jump_stats(const EdgeEstimates& mu, const EdgeEstimates& gamma) {
  if (mu.dimension() != gamma.dimension())
    fail(ErrorKind::DimensionMismatch, "jump_stats: families differ in dimension");
  JumpStats out;
  double sq = 0.0;
  for (int j = 0; j < mu.dimension(); ++j) {
    if (mu.coefficients[j].size() != gamma.coefficients[j].size())
      fail(ErrorKind::DimensionMismatch, "jump_stats: coefficient lengths differ");
    out.eta.push_back(mu.coefficients[j] - gamma.coefficients[j]);
    sq += out.eta.back().squaredNorm();
  }
  out.xi22 = std::sqrt(sq);
  out.psi = mu.dimension() > 0 ? out.xi22 / std::sqrt(static_cast<double>(mu.dimension())) : 0.0;
  return out;
}

DriftEstimates drift_estimates(const std::vector<Vector>& eta, const Matrix& z, int k,
                               double xi22) {
  if (!(xi22 > 0.0)) fail(ErrorKind::ZeroJump, "drift: jump size is zero");
  if (static_cast<Eigen::Index>(eta.size()) != z.cols())
    fail(ErrorKind::DimensionMismatch, "drift: eta does not match the data");
  check_segments(z, k, "drift");
  const int T = static_cast<int>(z.rows());
  const Matrix e = embed_columns(eta);
  const Matrix pre = segment_covariance(z, 0, k);
  const Matrix post = segment_covariance(z, k, T);
  const double norm = xi22 * xi22;
  DriftEstimates out;
  out.sigma1_sq = (e.transpose() * pre * e).trace() / norm;
  out.sigma2_sq = (e.transpose() * post * e).trace() / norm;
  return out;
}

ZetaSeries zeta_series(const Matrix& z, int k, const EdgeEstimates& mu,
                       const EdgeEstimates& gamma, const std::vector<Vector>& eta,
                       double xi22) {
  if (!(xi22 > 0.0)) fail(ErrorKind::ZeroJump, "zeta: jump size is zero");
  check_family(z, mu, "zeta");
  check_family(z, gamma, "zeta");
  if (static_cast<Eigen::Index>(eta.size()) != z.cols())
    fail(ErrorKind::DimensionMismatch, "zeta: eta does not match the data");
  check_segments(z, k, "zeta");
  const int T = static_cast<int>(z.rows());
  const int p = static_cast<int>(z.cols());
  const Matrix fitted_mu = z * embed_columns(mu.coefficients);
  const Matrix fitted_gamma = z * embed_columns(gamma.coefficients);
  const Matrix jump = z * embed_columns(eta);
  const double root_p = std::sqrt(static_cast<double>(p));

  ZetaSeries out;
  out.split_index = k;
  out.linear_part.resize(T);
  out.full_part.resize(T);
  for (int t = 0; t < T; ++t) {
    const auto& fitted = t < k ? fitted_mu : fitted_gamma;
    double cross = 0.0;
    double quad = 0.0;
    for (int j = 0; j < p; ++j) {
      const double eps = z(t, j) - fitted(t, j);
      cross += eps * jump(t, j);
      quad += jump(t, j) * jump(t, j);
    }
    out.linear_part(t) = cross / (xi22 * root_p);
    out.full_part(t) = (2.0 * cross - quad) / p;
    const double rebuilt = 2.0 * out.linear_part(t) * xi22 / root_p - quad / p;
    if (std::abs(rebuilt - out.full_part(t)) > 1e-9 * (1.0 + std::abs(quad) / p + std::abs(cross) / p))
      fail(ErrorKind::InvalidArgument, "zeta: linear and full parts are inconsistent");
  }
  return out;
}

double population_variance(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size());
}

SegmentVariances variance_estimates(const ZetaSeries& zs) {
  const int T = static_cast<int>(zs.full_part.size());
  const int k = zs.split_index;
  if (zs.linear_part.size() != T)
    fail(ErrorKind::DimensionMismatch, "variance: series lengths differ");
  if (k < 2 || T - k < 2) fail(ErrorKind::SegmentTooShort, "variance: segments need two rows");
  const std::span<const double> lin(zs.linear_part.data(), T);
  const std::span<const double> full(zs.full_part.data(), T);
  SegmentVariances out;
  out.sigma1_star_sq = population_variance(lin.first(k));
  out.sigma2_star_sq = population_variance(lin.subspan(k));
  out.bar_sigma1_sq = population_variance(full.first(k));
  out.bar_sigma2_sq = population_variance(full.subspan(k));
  return out;
}

std::vector<int> default_df_grid(int max_df) {
  require(max_df >= 1, "df grid: maximum must be positive");
  std::vector<int> grid(max_df);
  for (int k = 1; k <= max_df; ++k) grid[k - 1] = k;
  return grid;
}

double neg_scaled_chisq_cdf(double x, int df) {
  const double k = static_cast<double>(df);
  return 1.0 - chisq_cdf(k - x * std::sqrt(2.0 * k), df);
}

IncrementLawFit fit_increment_law(const ZetaSeries& zs, std::span<const int> df_grid) {
  require(!df_grid.empty(), "increment law: df grid is empty");
  const int T = static_cast<int>(zs.full_part.size());
  const int k = zs.split_index;
  if (k < 2 || T - k < 2) fail(ErrorKind::SegmentTooShort, "increment law: segments need two rows");

  std::vector<double> pooled(T);
  for (auto [begin, end] : {std::pair{0, k}, std::pair{k, T}}) {
    const std::span<const double> seg(zs.full_part.data() + begin, end - begin);
    double mean = 0.0;
    for (double v : seg) mean += v;
    mean /= static_cast<double>(seg.size());
    const double sd = std::sqrt(population_variance(seg));
    if (!(sd > 0.0)) fail(ErrorKind::ZeroJump, "increment law: segment series is constant");
    for (int t = begin; t < end; ++t) pooled[t] = (zs.full_part(t) - mean) / sd;
  }

  IncrementLawFit best{df_grid.front(), -1.0};
  for (int df : df_grid) {
    require(df >= 1, "increment law: degrees of freedom must be positive");
    const KsResult ks = ks_test(pooled, [df](double x) { return neg_scaled_chisq_cdf(x, df); });
    if (ks.p_value > best.ks_pvalue) best = {df, ks.p_value};
  }
  return best;
}

RegimeParams estimate_regime_params(const Matrix& z, const ChangePointFit& fit,
                                    const InferenceOptions& options) {
  const int k = fit.k_final;
  const RefitResult rf = refit(z, k, fit.edges_step2.mu, fit.edges_step2.gamma);
  const JumpStats js = jump_stats(rf.mu, rf.gamma);
  if (js.psi < kZeroJumpThreshold)
    fail(ErrorKind::ZeroJump, "estimated jump size is zero; no change detected");

  RegimeParams out;
  out.xi22 = js.xi22;
  out.psi = js.psi;
  const DriftEstimates drift = drift_estimates(js.eta, z, k, js.xi22);
  out.sigma1_sq = drift.sigma1_sq;
  out.sigma2_sq = drift.sigma2_sq;
  const ZetaSeries zs = zeta_series(z, k, rf.mu, rf.gamma, js.eta, js.xi22);
  const SegmentVariances var = variance_estimates(zs);
  out.sigma1_star_sq = var.sigma1_star_sq;
  out.sigma2_star_sq = var.sigma2_star_sq;
  out.bar_sigma1_sq = var.bar_sigma1_sq;
  out.bar_sigma2_sq = var.bar_sigma2_sq;
  const IncrementLawFit law = fit_increment_law(zs, default_df_grid(options.df_grid_max));
  out.df = law.df;
  out.ks_pvalue = law.ks_pvalue;
  return out;
}

ConfidenceInterval confidence_interval(int center_index, const RegimeParams& params,
                                       Regime regime, double alpha, double quantile) {
  require(alpha > 0.0 && alpha < 1.0, "confidence interval: alpha must lie in (0,1)");
  require(quantile >= 0.0, "confidence interval: quantile must be nonnegative");
  ConfidenceInterval ci;
  ci.regime = regime;
  ci.alpha = alpha;
  ci.center_index = center_index;
  if (regime == Regime::Vanishing) {
    if (params.psi < kZeroJumpThreshold || !(params.sigma1_sq > 0.0))
      fail(ErrorKind::ZeroJump, "confidence interval: jump size or drift is zero");
    ci.margin = quantile * params.sigma1_star_sq /
                (params.sigma1_sq * params.sigma1_sq * params.psi * params.psi);
  } else {
    ci.margin = quantile;
  }
  ci.lo = center_index - ci.margin;
  ci.hi = center_index + ci.margin;
  return ci;
}

ConfidenceInterval confidence_interval(const ChangePointFit& fit, const RegimeParams& params,
                                       Regime regime, double alpha, double quantile) {
  return confidence_interval(fit.k_final, params, regime, alpha, quantile);
}

}  // namespace gcpd
