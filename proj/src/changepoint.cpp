#include "gcpd/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gcpd/error.hpp"
#include "gcpd/kernels.hpp"

namespace gcpd {
namespace {

double row_loss(const Matrix& z, Eigen::Index t, const EdgeEstimates& e) {
  double total = 0.0;
  for (int j = 0; j < e.dimension(); ++j) {
    const double r = z(t, j) - z.row(t).dot(e.embedded(j));
    total += r * r;
  }
  return total;
}

double jump_norm(const NeighborhoodFit& fit) {
  double sq = 0.0;
  for (int j = 0; j < fit.mu.dimension(); ++j)
    sq += (fit.mu.coefficients[j] - fit.gamma.coefficients[j]).squaredNorm();
  return std::sqrt(sq / fit.mu.dimension());
}

void finish_step2(const Matrix& z, ChangePointFit& out, const LassoConfig& cfg) {
  const BicSelection sel = bic_select_at(z, out.k_step1, cfg);
  out.lambda_step2 = sel.lambda;
  out.edges_step2 = sel.fit;
  const ScanResult scan = scan_argmin(z, sel.fit.mu, sel.fit.gamma);
  out.k_final = scan.k;
  out.tau_final = static_cast<double>(scan.k) / out.T;
  out.q_profile = scan.q_profile;
  out.low_signal = jump_norm(sel.fit) < kZeroJumpThreshold;
}

}  // namespace

double q_loss(const Matrix& z, int k, const EdgeEstimates& mu, const EdgeEstimates& gamma) {
  const int T = static_cast<int>(z.rows());
  require(0 <= k && k <= T, "q_loss: split index out of range");
  if (mu.dimension() != z.cols() || gamma.dimension() != z.cols())
    fail(ErrorKind::DimensionMismatch, "q_loss: edge estimates do not match the data");
  double total = 0.0;
  for (int t = 0; t < T; ++t) total += row_loss(z, t, t < k ? mu : gamma);
  return total / T;
}

double u_criterion(const Matrix& z, int k, int k0, const EdgeEstimates& mu,
                   const EdgeEstimates& gamma) {
  const int T = static_cast<int>(z.rows());
  require(0 <= k && k <= T && 0 <= k0 && k0 <= T, "u_criterion: split index out of range");
  if (mu.dimension() != z.cols() || gamma.dimension() != z.cols())
    fail(ErrorKind::DimensionMismatch, "u_criterion: edge estimates do not match the data");
  // Rows between the two splits switch from γ to μ (k > k0) or back (k < k0).
  double total = 0.0;
  for (int t = std::min(k, k0); t < std::max(k, k0); ++t)
    total += row_loss(z, t, mu) - row_loss(z, t, gamma);
  return (k >= k0 ? total : -total) / T;
}

ScanResult scan_argmin(const Matrix& z, const EdgeEstimates& mu, const EdgeEstimates& gamma) {
  const int T = static_cast<int>(z.rows());
  require(T >= 2, "scan: need at least two rows");
  const kernels::RowCosts costs = kernels::row_costs(z, mu, gamma);

  // Q(k)·T = Σ_t γ-cost + Σ_{t<k} (μ-cost − γ-cost); rows with identical costs
  // contribute exactly zero so flat profiles stay flat.
  const double base = costs.gamma.sum();
  ScanResult out;
  out.q_profile.resize(T - 1);
  double prefix = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= T - 1; ++k) {
    prefix += costs.mu(k - 1) - costs.gamma(k - 1);
    out.q_profile[k - 1] = (base + prefix) / T;
    if (prefix < best) {
      best = prefix;
      out.k = k;
    }
  }
  return out;
}

std::vector<double> default_init_grid() { return {0.25, 0.5, 0.75}; }

Initialization initialize(const Matrix& z, const std::vector<double>& grid,
                          const LassoConfig& cfg) {
  require(!grid.empty(), "initialize: candidate grid is empty");
  const int T = static_cast<int>(z.rows());
  Initialization out;
  double best = std::numeric_limits<double>::infinity();
  for (double tau : grid) {
    require(tau > 0.0 && tau < 1.0, "initialize: candidates must lie in (0,1)");
    const int k = split_index(T, tau);
    BicSelection sel = bic_select_at(z, k, cfg);
    const double loss = q_loss(z, k, sel.fit.mu, sel.fit.gamma);
    out.candidates.push_back({tau, k, sel.lambda, loss});
    if (loss < best || (loss == best && tau < out.tau)) {
      best = loss;
      out.tau = tau;
      out.k = k;
      out.selection = std::move(sel);
    }
  }
  return out;
}

ChangePointFit algorithm1(const Matrix& z, const std::vector<double>& grid,
                          const LassoConfig& cfg) {
  const int T = static_cast<int>(z.rows());
  require(T >= 8, "algorithm1: need at least 8 observations");
  ChangePointFit out;
  out.T = T;

  Initialization init = initialize(z, grid, cfg);
  out.tau_init = init.tau;
  out.k_init = init.k;
  out.lambda_step1 = init.selection.lambda;
  out.edges_step1 = std::move(init.selection.fit);

  const ScanResult step1 = scan_argmin(z, out.edges_step1.mu, out.edges_step1.gamma);
  out.k_step1 = step1.k;
  if (out.k_step1 < 2 || out.k_step1 > T - 2) {
    out.k_step1 = std::clamp(out.k_step1, 2, T - 2);
    out.degenerate_split = true;
  }
  out.tau_step1 = static_cast<double>(out.k_step1) / T;

  finish_step2(z, out, cfg);
  return out;
}

ChangePointFit algorithm2(const Matrix& z, int external_k, const LassoConfig& cfg) {
  const int T = static_cast<int>(z.rows());
  require(T >= 8, "algorithm2: need at least 8 observations");
  require(external_k >= 2 && external_k <= T - 2, "algorithm2: external split must lie in [2, T-2]");
  ChangePointFit out;
  out.T = T;
  out.k_init = out.k_step1 = external_k;
  out.tau_init = out.tau_step1 = static_cast<double>(external_k) / T;
  finish_step2(z, out, cfg);
  return out;
}

}  // namespace gcpd
