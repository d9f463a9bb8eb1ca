#pragma once

#include <vector>

#include "gcpd/lasso.hpp"
#include "gcpd/numstats.hpp"

namespace gcpd {

/// Two-segment squared loss Q(z, k, μ, γ): rows [0, k) are predicted with μ,
/// rows [k, T) with γ, normalized by T. k may be 0 or T (one empty segment).
double q_loss(const Matrix& z, int k, const EdgeEstimates& mu, const EdgeEstimates& gamma);

/// Q(z, k) − Q(z, k0), evaluated through the rows between k and k0 only.
double u_criterion(const Matrix& z, int k, int k0, const EdgeEstimates& mu,
                   const EdgeEstimates& gamma);

struct ScanResult {
  int k = 1;
  /// Q at k = 1..T−1 (entry i holds Q at k = i + 1).
  std::vector<double> q_profile;
};

/// argmin of Q over k ∈ {1..T−1} with the coefficient families held fixed.
/// Ties go to the smallest k.
ScanResult scan_argmin(const Matrix& z, const EdgeEstimates& mu, const EdgeEstimates& gamma);

struct InitCandidate {
  double tau = 0.0;
  int k = 0;
  double lambda = 0.0;
  double loss = 0.0;
};

struct Initialization {
  double tau = 0.0;
  int k = 0;
  std::vector<InitCandidate> candidates;
  BicSelection selection;  // BIC-tuned fits at the selected split
};

/// Coarse-grid initializer: the candidate whose BIC-tuned fits give the
/// smallest Q at the candidate split itself (smallest τ on ties).
Initialization initialize(const Matrix& z, const std::vector<double>& grid,
                          const LassoConfig& cfg);

std::vector<double> default_init_grid();

struct ChangePointFit {
  int T = 0;
  double tau_init = 0.0;
  double tau_step1 = 0.0;
  double tau_final = 0.0;
  int k_init = 0;
  int k_step1 = 0;
  int k_final = 0;
  double lambda_step1 = 0.0;
  double lambda_step2 = 0.0;
  NeighborhoodFit edges_step1;
  NeighborhoodFit edges_step2;
  std::vector<double> q_profile;
  /// Step-1 split had to be moved into [2, T−2] before refitting.
  bool degenerate_split = false;
  /// Jump size of the Step-2 lasso fits fell below the inference threshold.
  bool low_signal = false;
};

/// Jump sizes below this are treated as "no change" by the inference path.
inline constexpr double kZeroJumpThreshold = 1e-8;

/// Initializer, then two scan/refit rounds.
ChangePointFit algorithm1(const Matrix& z, const std::vector<double>& grid,
                          const LassoConfig& cfg);

/// Step 2 only, seeded with an externally supplied split index.
ChangePointFit algorithm2(const Matrix& z, int external_k, const LassoConfig& cfg);

}  // namespace gcpd
