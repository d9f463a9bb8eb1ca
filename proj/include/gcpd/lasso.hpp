#pragma once

#include <span>
#include <vector>

#include "gcpd/numstats.hpp"

namespace gcpd {

/// `n` equally spaced values strictly inside (0, 1): i/(n+1), i = 1..n.
std::vector<double> default_lambda_grid(int n = 75);

struct LassoConfig {
  double tol = 1e-7;
  int max_iter = 10000;
  std::vector<double> lambda_grid = default_lambda_grid();

  void validate() const;
};

struct LassoFit {
  Vector beta;
  bool converged = false;
  int iterations = 0;
};

inline double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

/// Coordinate descent on βᵀGβ − 2cᵀβ + λ‖β‖₁, which is the usual
/// (1/n)‖y − Xβ‖² + λ‖β‖₁ objective when G = XᵀX/n and c = Xᵀy/n.
/// Converged when the largest coordinate change in a full sweep is below tol.
/// `warm` (same length as c) seeds the iterate.
LassoFit lasso_gram(const Matrix& gram, const Vector& cov, double lambda,
                    const LassoConfig& cfg, const Vector* warm = nullptr);

LassoFit lasso_fit(const Matrix& x, const Vector& y, double lambda,
                   const LassoConfig& cfg);

/// (1/n)‖y − Xβ‖² + λ‖β‖₁.
double lasso_objective(const Matrix& x, const Vector& y, const Vector& beta,
                       double lambda);

/// Neighborhood coefficients for one segment: vector j regresses column j on
/// the others, so it has p−1 entries in column order with j skipped.
struct EdgeEstimates {
  std::vector<Vector> coefficients;
  /// Nonzero positions, reported as original column indices (never j itself).
  std::vector<std::vector<int>> supports;
  double tau_used = 0.0;
  double lambda_used = 0.0;

  static EdgeEstimates zeros(int p);

  int dimension() const { return static_cast<int>(coefficients.size()); }
  /// Length-p embedding of vector j with a zero at position j.
  Vector embedded(int j) const;
  void refresh_supports();
};

/// Column index of position `pos` in the vector for variable j.
inline int column_of(int j, int pos) { return pos < j ? pos : pos + 1; }
/// Position of column `col` (≠ j) in the vector for variable j.
inline int position_of(int j, int col) { return col < j ? col : col - 1; }

struct NeighborhoodFit {
  EdgeEstimates mu;
  EdgeEstimates gamma;
  int unconverged = 0;
};

/// Lasso regressions of each column on the rest, separately for rows [0, k)
/// and [k, T), with one shared λ.
NeighborhoodFit neighborhood_fit_at(const Matrix& z, int k, double lambda,
                                    const LassoConfig& cfg);
NeighborhoodFit neighborhood_fit(const Matrix& z, double tau, double lambda,
                                 const LassoConfig& cfg);

struct BicSelection {
  double lambda = 0.0;
  double bic = 0.0;
  NeighborhoodFit fit;
  /// BIC at each λ of the config grid, in grid order.
  std::vector<double> bic_path;
};

/// Residual sums of squares of both segments plus |Ŝ|·log T, where Ŝ is the
/// set of edges (j, k) selected in either segment.
BicSelection bic_select_at(const Matrix& z, int k, const LassoConfig& cfg);
BicSelection bic_select(const Matrix& z, double tau, const LassoConfig& cfg);

}  // namespace gcpd
