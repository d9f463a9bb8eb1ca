#include "gcpd/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gcpd/error.hpp"

namespace gcpd {
namespace {

constexpr std::uint64_t kVanishingStream = 0x7661;
constexpr std::uint64_t kNonVanishingStream = 0x6e76;

double escaped_share(const std::vector<kernels::PathExtremum>& pool, double horizon) {
  if (pool.empty()) return 0.0;
  const double edge = 0.9 * horizon;
  std::size_t escaped = 0;
  for (const auto& e : pool)
    if (e.location > edge) ++escaped;
  return static_cast<double>(escaped) / pool.size();
}

/// Signed argmax from the two branch maxima. Ties go to the smaller |r|, then to r < 0.
double combine(double left_sup, double left_loc, double right_sup, double right_loc) {
  if (left_sup > right_sup) return -left_loc;
  if (right_sup > left_sup) return right_loc;
  return right_loc < left_loc ? right_loc : -left_loc;
}

std::vector<double> absolute(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::abs(x); });
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

VanishingRatios vanishing_ratios(double sigma1_star_sq, double sigma2_star_sq,
                                 double sigma1_sq, double sigma2_sq) {
  if (!(sigma1_sq > 0.0) || !(sigma2_sq > 0.0))
    fail(ErrorKind::ZeroJump, "vanishing quantile: drift terms must be positive");
  if (!(sigma1_star_sq > 0.0))
    fail(ErrorKind::ZeroJump, "vanishing quantile: pre-change variance is zero");
  require(sigma2_star_sq >= 0.0, "vanishing quantile: variance must be nonnegative");
  return {2.0 * std::sqrt(sigma2_star_sq / sigma1_star_sq), sigma2_sq / sigma1_sq};
}

VanishingArgmaxSampler::VanishingArgmaxSampler(const VanishingMcConfig& cfg) {
  require(cfg.n_paths > 0, "vanishing quantile: n_paths must be positive");
  require(cfg.step > 0.0 && cfg.horizon > cfg.step,
          "vanishing quantile: need 0 < step < horizon");
  const Rng base(cfg.seed, kVanishingStream);
  double horizon = cfg.horizon;
  for (int attempt = 0;; ++attempt) {
    left_ = kernels::drift_pool(cfg.n_paths, cfg.step, horizon, base.child(0));
    right_ = kernels::drift_pool(cfg.n_paths, cfg.step, horizon, base.child(1));
    escape_fraction_ = std::max(escaped_share(left_, horizon), escaped_share(right_, horizon));
    horizon_ = horizon;
    if (escape_fraction_ <= kMaxEscapeFraction) return;
    if (!cfg.adaptive || attempt >= cfg.max_doublings)
      fail(ErrorKind::HorizonTooSmall,
           "vanishing quantile: " + std::to_string(escape_fraction_) +
               " of paths peak near the horizon " + std::to_string(horizon));
    horizon *= 2.0;
  }
}

std::vector<double> VanishingArgmaxSampler::draws(const VanishingRatios& ratios) const {
  require(ratios.drift > 0.0 && ratios.scale >= 0.0, "vanishing quantile: invalid ratios");
  const double a = ratios.scale;
  const double b = ratios.drift;
  // a·W(r) − b·r  =  (a²/4b)·(2W(u) − u)  with r = (a²/4b²)·u.
  const double value_scale = a * a / (4.0 * b);
  const double time_scale = a * a / (4.0 * b * b);
  std::vector<double> out(left_.size());
  for (std::size_t i = 0; i < left_.size(); ++i)
    out[i] = combine(left_[i].sup, left_[i].location, value_scale * right_[i].sup,
                     time_scale * right_[i].location);
  return out;
}

std::vector<double> VanishingArgmaxSampler::quantiles(std::span<const double> alphas,
                                                      const VanishingRatios& ratios) const {
  const std::vector<double> abs_draws = absolute(draws(ratios));
  std::vector<double> out;
  out.reserve(alphas.size());
  for (double alpha : alphas) {
    require(alpha > 0.0 && alpha < 1.0, "vanishing quantile: alpha must lie in (0,1)");
    out.push_back(empirical_quantile(abs_draws, 1.0 - alpha));
  }
  return out;
}

double quantile_vanishing(double alpha, double sigma1_star_sq, double sigma2_star_sq,
                          double sigma1_sq, double sigma2_sq, const VanishingMcConfig& cfg) {
  const VanishingRatios ratios =
      vanishing_ratios(sigma1_star_sq, sigma2_star_sq, sigma1_sq, sigma2_sq);
  const VanishingArgmaxSampler sampler(cfg);
  const double alphas[] = {alpha};
  return sampler.quantiles(alphas, ratios).front();
}

std::vector<double> vanishing_argmax_direct(const VanishingRatios& ratios, int n_paths,
                                            double step, double horizon, const Rng& rng) {
  require(n_paths > 0, "direct simulation: n_paths must be positive");
  require(step > 0.0 && horizon > step, "direct simulation: need 0 < step < horizon");
  const int steps = static_cast<int>(std::llround(horizon / step));
  const double root_step = std::sqrt(step);
  std::vector<double> out(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    Rng path_rng = rng.child(static_cast<std::uint64_t>(i));
    double left = 0.0, right = 0.0;
    double left_sup = 0.0, right_sup = 0.0;
    double left_loc = 0.0, right_loc = 0.0;
    for (int s = 1; s <= steps; ++s) {
      const double r = s * step;
      left += 2.0 * root_step * standard_normal(path_rng) - step;
      right += ratios.scale * root_step * standard_normal(path_rng) - ratios.drift * step;
      if (left > left_sup) {
        left_sup = left;
        left_loc = r;
      }
      if (right > right_sup) {
        right_sup = right;
        right_loc = r;
      }
    }
    out[i] = combine(left_sup, left_loc, right_sup, right_loc);
  }
  return out;
}

double symmetric_argmax_cdf(double x) {
  if (x < 0.0) return 1.0 - symmetric_argmax_cdf(-x);
  if (x == 0.0) return 0.5;
  const double root = std::sqrt(x);
  // eˣ·Φ(−3√x/2) overflows for large x; evaluate it in log space.
  const double tail = std::exp(x + std::log(normal_cdf(-1.5 * root)));
  return 1.0 + std::sqrt(x / (2.0 * std::numbers::pi)) * std::exp(-x / 8.0) -
         0.5 * (x + 5.0) * normal_cdf(-0.5 * root) + 1.5 * tail;
}

WalkLaws walk_laws(const RegimeParams& params) {
  if (params.psi < kZeroJumpThreshold)
    fail(ErrorKind::ZeroJump, "non-vanishing quantile: jump size is zero");
  require(params.df >= 1, "non-vanishing quantile: df must be positive");
  require(params.bar_sigma1_sq >= 0.0 && params.bar_sigma2_sq >= 0.0,
          "non-vanishing quantile: variances must be nonnegative");
  const double psi_sq = params.psi * params.psi;
  WalkLaws laws;
  laws.left = {-psi_sq * params.sigma1_sq, std::sqrt(params.bar_sigma1_sq), params.df};
  laws.right = {-psi_sq * params.sigma2_sq, std::sqrt(params.bar_sigma2_sq), params.df};
  if (!(laws.left.mean < 0.0) || !(laws.right.mean < 0.0))
    fail(ErrorKind::ZeroJump, "non-vanishing quantile: walk drift must be negative");
  return laws;
}

std::vector<int> nonvanishing_quantiles(const RegimeParams& params,
                                        std::span<const double> alphas,
                                        const NonVanishingMcConfig& cfg) {
  require(cfg.n_paths > 0 && cfg.horizon > 0, "non-vanishing quantile: invalid Monte Carlo size");
  for (double alpha : alphas)
    require(alpha > 0.0 && alpha < 1.0, "non-vanishing quantile: alpha must lie in (0,1)");
  const WalkLaws laws = walk_laws(params);
  const Rng base(cfg.seed, kNonVanishingStream);

  int horizon = cfg.horizon;
  std::vector<int> argmax;
  for (int attempt = 0;; ++attempt) {
    argmax = kernels::walk_argmax(cfg.n_paths, horizon, laws.left, laws.right, base);
    const double edge = 0.9 * horizon;
    const auto escaped = std::count_if(argmax.begin(), argmax.end(),
                                       [edge](int r) { return std::abs(r) > edge; });
    const double fraction = static_cast<double>(escaped) / cfg.n_paths;
    if (fraction <= kMaxEscapeFraction) break;
    if (!cfg.adaptive || attempt >= cfg.max_doublings)
      fail(ErrorKind::HorizonTooSmall,
           "non-vanishing quantile: " + std::to_string(fraction) +
               " of walks peak near the horizon " + std::to_string(horizon));
    horizon *= 2;
  }

  std::vector<double> abs_argmax(argmax.size());
  std::transform(argmax.begin(), argmax.end(), abs_argmax.begin(),
                 [](int r) { return static_cast<double>(std::abs(r)); });
  std::vector<int> out;
  out.reserve(alphas.size());
  for (double alpha : alphas)
    out.push_back(static_cast<int>(empirical_quantile(abs_argmax, 1.0 - alpha)));
  return out;
}

int quantile_nonvanishing(double alpha, const RegimeParams& params,
                          const NonVanishingMcConfig& cfg) {
  const double alphas[] = {alpha};
  return nonvanishing_quantiles(params, alphas, cfg).front();
}

double empirical_quantile(std::vector<double> values, double level) {
  if (values.empty()) fail(ErrorKind::EmptySample, "quantile of an empty sample");
  require(level > 0.0 && level <= 1.0, "quantile level must lie in (0,1]");
  const double n = static_cast<double>(values.size());
  // Guard against level·n landing a hair above an integer through rounding.
  auto rank = static_cast<std::size_t>(std::ceil(level * n - 1e-9 * n));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[rank - 1];
}

}  // namespace gcpd
