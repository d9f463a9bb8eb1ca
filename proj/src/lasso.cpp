#include "gcpd/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gcpd/error.hpp"
#include "gcpd/kernels.hpp"

namespace gcpd {

std::vector<double> default_lambda_grid(int n) {
  require(n >= 1, "lambda grid needs at least one value");
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = static_cast<double>(i + 1) / (n + 1);
  return grid;
}

void LassoConfig::validate() const {
  require(tol > 0.0, "lasso: tol must be positive");
  require(max_iter >= 1, "lasso: max_iter must be at least 1");
  require(!lambda_grid.empty(), "lasso: lambda grid is empty");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    require(lambda_grid[i] >= 0.0, "lasso: lambda values must be nonnegative");
    if (i > 0) require(lambda_grid[i] > lambda_grid[i - 1], "lasso: lambda grid must be ascending");
  }
}

LassoFit lasso_gram(const Matrix& gram, const Vector& cov, double lambda,
                    const LassoConfig& cfg, const Vector* warm) {
  const Eigen::Index q = cov.size();
  if (gram.rows() != q || gram.cols() != q)
    fail(ErrorKind::DimensionMismatch, "lasso: Gram matrix does not match the covariate vector");
  require(lambda >= 0.0, "lasso: lambda must be nonnegative");

  LassoFit out;
  out.beta = warm != nullptr ? *warm : Vector::Zero(q);
  if (out.beta.size() != q) fail(ErrorKind::DimensionMismatch, "lasso: warm start has wrong length");
  Vector& beta = out.beta;
  Vector grad = cov - gram * beta;
  const double threshold = 0.5 * lambda;

  auto update = [&](Eigen::Index k) {
    const double gkk = gram(k, k);
    const double old = beta(k);
    const double fresh = gkk > 0.0 ? soft_threshold(grad(k) + gkk * old, threshold) / gkk : 0.0;
    const double delta = fresh - old;
    if (delta != 0.0) {
      beta(k) = fresh;
      grad.noalias() -= gram.col(k) * delta;
    }
    return std::abs(delta);
  };

  // Full sweeps alternate with sweeps over the current nonzero set; only a
  // full sweep can declare convergence.
  bool full_sweep = true;
  while (out.iterations < cfg.max_iter) {
    ++out.iterations;
    double max_change = 0.0;
    if (full_sweep) {
      for (Eigen::Index k = 0; k < q; ++k) max_change = std::max(max_change, update(k));
      if (max_change < cfg.tol) {
        out.converged = true;
        break;
      }
      full_sweep = false;
    } else {
      for (Eigen::Index k = 0; k < q; ++k)
        if (beta(k) != 0.0) max_change = std::max(max_change, update(k));
      if (max_change < cfg.tol) full_sweep = true;
    }
  }
  return out;
}

LassoFit lasso_fit(const Matrix& x, const Vector& y, double lambda,
                   const LassoConfig& cfg) {
  if (x.rows() != y.size()) fail(ErrorKind::DimensionMismatch, "lasso: rows of x and y differ");
  require(x.rows() >= 1, "lasso: need at least one observation");
  const double n = static_cast<double>(x.rows());
  const Matrix gram = x.transpose() * x / n;
  const Vector cov = x.transpose() * y / n;
  return lasso_gram(gram, cov, lambda, cfg);
}

double lasso_objective(const Matrix& x, const Vector& y, const Vector& beta,
                       double lambda) {
  return (y - x * beta).squaredNorm() / static_cast<double>(x.rows()) +
         lambda * beta.lpNorm<1>();
}

EdgeEstimates EdgeEstimates::zeros(int p) {
  EdgeEstimates e;
  e.coefficients.assign(p, Vector::Zero(std::max(p - 1, 0)));
  e.supports.assign(p, {});
  return e;
}

Vector EdgeEstimates::embedded(int j) const {
  const int p = dimension();
  Vector full = Vector::Zero(p);
  for (int pos = 0; pos < p - 1; ++pos) full(column_of(j, pos)) = coefficients[j](pos);
  return full;
}

void EdgeEstimates::refresh_supports() {
  supports.assign(coefficients.size(), {});
  for (int j = 0; j < dimension(); ++j)
    for (int pos = 0; pos < coefficients[j].size(); ++pos)
      if (coefficients[j](pos) != 0.0) supports[j].push_back(column_of(j, pos));
}

namespace {

void check_split(const Matrix& z, int k) {
  require(z.cols() >= 2, "neighborhood fit: need at least two variables");
  require(k >= 2 && z.rows() - k >= 2,
          "neighborhood fit: both segments need at least two rows (split " + std::to_string(k) +
              " of " + std::to_string(z.rows()) + ")");
}

NeighborhoodFit assemble(const std::vector<kernels::ColumnPath>& paths, std::size_t index,
                         double tau, double lambda) {
  const int p = static_cast<int>(paths.size());
  NeighborhoodFit fit;
  fit.mu = EdgeEstimates::zeros(p);
  fit.gamma = EdgeEstimates::zeros(p);
  for (int j = 0; j < p; ++j) {
    fit.mu.coefficients[j] = paths[j].pre[index];
    fit.gamma.coefficients[j] = paths[j].post[index];
    fit.unconverged += paths[j].unconverged;
  }
  for (EdgeEstimates* e : {&fit.mu, &fit.gamma}) {
    e->tau_used = tau;
    e->lambda_used = lambda;
    e->refresh_supports();
  }
  return fit;
}

}  // namespace

NeighborhoodFit neighborhood_fit_at(const Matrix& z, int k, double lambda,
                                    const LassoConfig& cfg) {
  check_split(z, k);
  cfg.validate();
  const int T = static_cast<int>(z.rows());
  const double lambdas[] = {lambda};
  const auto paths = kernels::neighborhood_paths(segment_moments(z, 0, k), k,
                                                 segment_moments(z, k, T), T - k, lambdas, cfg);
  return assemble(paths, 0, static_cast<double>(k) / T, lambda);
}

NeighborhoodFit neighborhood_fit(const Matrix& z, double tau, double lambda,
                                 const LassoConfig& cfg) {
  return neighborhood_fit_at(z, split_index(static_cast<int>(z.rows()), tau), lambda, cfg);
}

BicSelection bic_select_at(const Matrix& z, int k, const LassoConfig& cfg) {
  check_split(z, k);
  cfg.validate();
  const int T = static_cast<int>(z.rows());
  const int p = static_cast<int>(z.cols());

  // Warm starts run from the largest λ down.
  std::vector<double> descending(cfg.lambda_grid.rbegin(), cfg.lambda_grid.rend());
  const auto paths = kernels::neighborhood_paths(segment_moments(z, 0, k), k,
                                                 segment_moments(z, k, T), T - k, descending, cfg);

  const std::size_t m = descending.size();
  const double log_t = std::log(static_cast<double>(T));
  BicSelection sel;
  sel.bic_path.assign(m, 0.0);
  std::size_t best = 0;
  double best_bic = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < m; ++g) {
    // index into the descending path for grid position g (ascending)
    const std::size_t d = m - 1 - g;
    double rss = 0.0;
    long edges = 0;
    for (int j = 0; j < p; ++j) {
      rss += paths[j].rss_pre[d] + paths[j].rss_post[d];
      const Vector& a = paths[j].pre[d];
      const Vector& b = paths[j].post[d];
      for (Eigen::Index pos = 0; pos < a.size(); ++pos)
        if (a(pos) != 0.0 || b(pos) != 0.0) ++edges;
    }
    const double bic = rss + static_cast<double>(edges) * log_t;
    sel.bic_path[g] = bic;
    if (bic < best_bic) {
      best_bic = bic;
      best = d;
    }
  }
  sel.lambda = descending[best];
  sel.bic = best_bic;
  sel.fit = assemble(paths, best, static_cast<double>(k) / T, sel.lambda);
  return sel;
}

BicSelection bic_select(const Matrix& z, double tau, const LassoConfig& cfg) {
  return bic_select_at(z, split_index(static_cast<int>(z.rows()), tau), cfg);
}

}  // namespace gcpd
