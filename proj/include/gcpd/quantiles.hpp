#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gcpd/inference.hpp"
#include "gcpd/kernels.hpp"

namespace gcpd {

/// Monte Carlo settings for the argmax of the two-sided drifted Brownian motion.
/// `step` and `horizon` are in the time units of the reference branch 2W(r) − |r|.
struct VanishingMcConfig {
  int n_paths = 20000;
  double step = 0.01;
  double horizon = 50.0;
  std::uint64_t seed = 0;
  /// Double the horizon (up to max_doublings times) instead of failing the escape check.
  bool adaptive = true;
  int max_doublings = 4;
};

/// Right branch of Z(r) = scale·W₂(r) − drift·r; the left branch is 2W₁(r) − |r|.
struct VanishingRatios {
  double scale = 2.0;
  double drift = 1.0;
};

VanishingRatios vanishing_ratios(double sigma1_star_sq, double sigma2_star_sq,
                                 double sigma1_sq, double sigma2_sq);

/// Paths allowed to peak in the outer tenth of the horizon before the horizon
/// is considered too small.
inline constexpr double kMaxEscapeFraction = 1e-3;

/// Draws of argmax Z(r) for arbitrary right-branch ratios from one pool of
/// simulated reference paths.
///
/// a·W(r) − b·r equals (a²/4b)·(2W(u) − u) in law with r = (a²/4b²)·u, so a
/// pool of reference-branch extrema (sup, location) rescales exactly to any
/// (a, b). The pool is simulated once; each query is O(n_paths).
class VanishingArgmaxSampler {
 public:
  explicit VanishingArgmaxSampler(const VanishingMcConfig& cfg);

  /// Signed argmax draws, one per path, in path order.
  std::vector<double> draws(const VanishingRatios& ratios) const;

  /// Smallest q with P̂(|argmax| ≤ q) ≥ 1 − α, for each α.
  std::vector<double> quantiles(std::span<const double> alphas,
                                const VanishingRatios& ratios) const;

  double horizon() const { return horizon_; }
  double escape_fraction() const { return escape_fraction_; }

 private:
  std::vector<kernels::PathExtremum> left_;
  std::vector<kernels::PathExtremum> right_;
  double horizon_ = 0.0;
  double escape_fraction_ = 0.0;
};

double quantile_vanishing(double alpha, double sigma1_star_sq, double sigma2_star_sq,
                          double sigma1_sq, double sigma2_sq, const VanishingMcConfig& cfg);

/// Literal discretization of Z(r) on the grid ±horizon with the given step:
/// both branches simulated directly. Serial; kept as an independent check on
/// the rescaled pool.
std::vector<double> vanishing_argmax_direct(const VanishingRatios& ratios, int n_paths,
                                            double step, double horizon, const Rng& rng);

/// P(argmax ≤ x) for the symmetric process 2W(r) − |r| (unit ratios).
double symmetric_argmax_cdf(double x);

struct NonVanishingMcConfig {
  int n_paths = 3000;
  int horizon = 1000;
  std::uint64_t seed = 0;
  bool adaptive = true;
  int max_doublings = 3;
};

struct WalkLaws {
  kernels::IncrementLaw left;
  kernels::IncrementLaw right;
};

/// Increment laws −ψ²σᵢ² + σ̄ᵢ·X with X the fitted negative scaled χ²_df.
WalkLaws walk_laws(const RegimeParams& params);

/// Smallest integer m with P̂(|argmax C∞| ≤ m) ≥ 1 − α, for each α.
std::vector<int> nonvanishing_quantiles(const RegimeParams& params,
                                        std::span<const double> alphas,
                                        const NonVanishingMcConfig& cfg);

int quantile_nonvanishing(double alpha, const RegimeParams& params,
                          const NonVanishingMcConfig& cfg);

/// Smallest sample value v with (#{x ≤ v}/n) ≥ level. `values` need not be sorted.
double empirical_quantile(std::vector<double> values, double level);

}  // namespace gcpd
