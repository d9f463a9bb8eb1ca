#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP version (namespace
// gcpd::kernels) and a plain serial version (gcpd::kernels::serial) with the
// same signature. Work items draw randomness from per-item child streams, so
// the two versions return bit-identical results for any thread count.

#include <span>
#include <vector>

#include "gcpd/lasso.hpp"
#include "gcpd/numstats.hpp"
#include "gcpd/rng.hpp"

namespace gcpd::kernels {

/// λ path for one variable over both segments, in the order λ was supplied.
struct ColumnPath {
  std::vector<Vector> pre;
  std::vector<Vector> post;
  std::vector<double> rss_pre;
  std::vector<double> rss_post;
  int unconverged = 0;
};

/// Per-row squared prediction error under each coefficient family:
/// cost(t) = Σⱼ (z_tj − z_{t,−j}ᵀβ_(j))².
struct RowCosts {
  Vector mu;
  Vector gamma;
};

/// Supremum of a one-sided discretized path and the first grid point attaining it.
struct PathExtremum {
  double sup = 0.0;
  double location = 0.0;
};

/// Increment law of one branch of the two-sided random walk:
/// mean + sd · X with X = −(χ²_df − df)/√(2·df).
struct IncrementLaw {
  double mean = 0.0;
  double sd = 0.0;
  int df = 1;
};

std::vector<ColumnPath> neighborhood_paths(const Matrix& moments_pre, int n_pre,
                                           const Matrix& moments_post, int n_post,
                                           std::span<const double> lambdas,
                                           const LassoConfig& cfg);

RowCosts row_costs(const Matrix& z, const EdgeEstimates& mu,
                   const EdgeEstimates& gamma);

/// Paths of 2W(r) − r on r = 0, step, ..., horizon; path i uses rng.child(i).
std::vector<PathExtremum> drift_pool(int n_paths, double step, double horizon,
                                     const Rng& rng);

/// argmax over r ∈ {−H..H} of the two-sided walk with C(0) = 0.
/// Ties go to the smaller |r|, then to negative r. Path i uses rng.child(i).
std::vector<int> walk_argmax(int n_paths, int horizon, const IncrementLaw& left,
                             const IncrementLaw& right, const Rng& rng);

namespace serial {

std::vector<ColumnPath> neighborhood_paths(const Matrix& moments_pre, int n_pre,
                                           const Matrix& moments_post, int n_post,
                                           std::span<const double> lambdas,
                                           const LassoConfig& cfg);

RowCosts row_costs(const Matrix& z, const EdgeEstimates& mu,
                   const EdgeEstimates& gamma);

std::vector<PathExtremum> drift_pool(int n_paths, double step, double horizon,
                                     const Rng& rng);

std::vector<int> walk_argmax(int n_paths, int horizon, const IncrementLaw& left,
                             const IncrementLaw& right, const Rng& rng);

}  // namespace serial
}  // namespace gcpd::kernels
