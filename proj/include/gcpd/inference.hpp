#pragma once

#include <span>
#include <string>
#include <vector>

#include "gcpd/changepoint.hpp"
#include "gcpd/lasso.hpp"
#include "gcpd/numstats.hpp"

namespace gcpd {

enum class Regime { Vanishing, NonVanishing };

std::string to_string(Regime regime);
Regime regime_from_string(const std::string& name);

struct RegimeParams {
  double xi22 = 0.0;
  double psi = 0.0;
  double sigma1_sq = 0.0;
  double sigma2_sq = 0.0;
  double sigma1_star_sq = 0.0;
  double sigma2_star_sq = 0.0;
  double bar_sigma1_sq = 0.0;
  double bar_sigma2_sq = 0.0;
  int df = 1;
  double ks_pvalue = 0.0;
};

struct ConfidenceInterval {
  Regime regime = Regime::Vanishing;
  double alpha = 0.05;
  int center_index = 0;
  double margin = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double index) const { return lo <= index && index <= hi; }
};

struct RefitResult {
  EdgeEstimates mu;
  EdgeEstimates gamma;
  /// Variables whose restricted design was singular; these keep the lasso estimate.
  std::vector<int> fallback_mu;
  std::vector<int> fallback_gamma;
};

/// OLS on the lasso supports, rows [0, k) for μ and [k, T) for γ.
RefitResult refit(const Matrix& z, int k, const EdgeEstimates& mu_hat,
                  const EdgeEstimates& gamma_hat);

struct JumpStats {
  std::vector<Vector> eta;  // μ_(j) − γ_(j), length p−1 each
  double xi22 = 0.0;
  double psi = 0.0;
};

JumpStats jump_stats(const EdgeEstimates& mu, const EdgeEstimates& gamma);

struct DriftEstimates {
  double sigma1_sq = 0.0;
  double sigma2_sq = 0.0;
};

/// ξ⁻² Σⱼ ηⱼᵀ C_{−j,−j} ηⱼ with C the sample covariance of each segment.
DriftEstimates drift_estimates(const std::vector<Vector>& eta, const Matrix& z, int k,
                               double xi22);

struct ZetaSeries {
  Vector linear_part;
  Vector full_part;
  int split_index = 0;
};

ZetaSeries zeta_series(const Matrix& z, int k, const EdgeEstimates& mu,
                       const EdgeEstimates& gamma, const std::vector<Vector>& eta,
                       double xi22);

struct SegmentVariances {
  double sigma1_star_sq = 0.0;
  double sigma2_star_sq = 0.0;
  double bar_sigma1_sq = 0.0;
  double bar_sigma2_sq = 0.0;
};

/// Per-segment variances (denominator = segment length).
SegmentVariances variance_estimates(const ZetaSeries& zs);

/// Population variance (denominator n) of a contiguous range.
double population_variance(std::span<const double> x);

struct IncrementLawFit {
  int df = 1;
  double ks_pvalue = 0.0;
};

std::vector<int> default_df_grid(int max_df = 100);

/// CDF of −(χ²_df − df)/√(2·df).
double neg_scaled_chisq_cdf(double x, int df);

/// Standardizes full_part within each segment, pools the result and picks the
/// df whose negative centered and scaled χ² maximizes the KS p-value.
IncrementLawFit fit_increment_law(const ZetaSeries& zs, std::span<const int> df_grid);

struct InferenceOptions {
  int df_grid_max = 100;
};

/// Full plug-in pipeline from a change-point fit: refit, jump size, drifts,
/// variances and the increment law. Throws ZeroJump when ψ̃ < kZeroJumpThreshold.
RegimeParams estimate_regime_params(const Matrix& z, const ChangePointFit& fit,
                                    const InferenceOptions& options = {});

/// ⌊Tτ̃⌋ ± ME with ME = q·σ₁*²/(σ₁⁴ψ²) (vanishing) or ME = q (non-vanishing).
ConfidenceInterval confidence_interval(int center_index, const RegimeParams& params,
                                       Regime regime, double alpha, double quantile);
ConfidenceInterval confidence_interval(const ChangePointFit& fit, const RegimeParams& params,
                                       Regime regime, double alpha, double quantile);

}  // namespace gcpd
