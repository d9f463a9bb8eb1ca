#pragma once

#include <cstdint>
#include <string>

#include "gcpd/numstats.hpp"

namespace gcpd {

enum class CovarianceKind { ToeplitzBlockSign, Banded };

std::string to_string(CovarianceKind kind);
CovarianceKind covariance_kind_from_string(const std::string& name);

struct CovarianceSpec {
  int p = 0;
  int s = 1;
  double rho = 0.0;
  CovarianceKind kind = CovarianceKind::ToeplitzBlockSign;
};

struct ScenarioConfig {
  int T = 0;
  int p = 0;
  double tau0 = 0.5;
  CovarianceSpec sigma_spec;
  CovarianceSpec delta_spec;
  std::uint64_t seed = 0;

  int change_index() const { return split_index(T, tau0); }
  void validate() const;
};

/// Block-diagonal Toeplitz-type covariance: Γ(l,m) = rho^{|l-m|^a}, a = 1/log s,
/// multiplied entrywise by a checkerboard sign mask on contiguous s×s blocks.
Matrix build_pre_covariance(int p, int s, double rho);

/// Unit-diagonal banded covariance; band d ∈ {1..s} carries rho2·(s-d+1)/s.
Matrix build_post_covariance(int p, int s, double rho2);

Matrix build_covariance(const CovarianceSpec& spec);

/// Rows 1..⌊Tτ⁰⌋ from N(0, Σ), the remainder from N(0, Δ).
Matrix generate_series(const ScenarioConfig& cfg);

/// The simulation design used throughout the replication tables:
/// Σ block width round(0.15p) with rho 0.4, Δ band width round(0.2p) with rho2 0.5.
ScenarioConfig standard_scenario(int T, int p, double tau0, std::uint64_t seed);

}  // namespace gcpd
