#include "gcpd/kernels.hpp"

#include <cmath>
#include <random>

#include "gcpd/error.hpp"

namespace gcpd::kernels {
namespace {

Matrix drop_index(const Matrix& s, int j) {
  const int p = static_cast<int>(s.rows());
  if (p < 2) fail(ErrorKind::InvalidArgument, "neighborhood regression needs p >= 2");
  const int m = p - 1;
  Matrix out(m, m);
  for (int b = 0; b < m; ++b)
    for (int a = 0; a < m; ++a) out(a, b) = s(column_of(j, a), column_of(j, b));
  return out;
}

Vector drop_entry(const Vector& v, int j) {
  Vector out(v.size() - 1);
  for (int a = 0; a < out.size(); ++a) out(a) = v(column_of(j, a));
  return out;
}

void segment_path(const Matrix& moments, int n, int j, std::span<const double> lambdas,
                  const LassoConfig& cfg, std::vector<Vector>& betas, std::vector<double>& rss,
                  int& unconverged) {
  const Matrix gram = drop_index(moments, j);
  const Vector cov = drop_entry(moments.col(j), j);
  const double yy = moments(j, j);
  Vector warm = Vector::Zero(cov.size());
  betas.clear();
  rss.clear();
  for (double lambda : lambdas) {
    LassoFit fit = lasso_gram(gram, cov, lambda, cfg, &warm);
    if (!fit.converged) ++unconverged;
    const double per_row = yy - 2.0 * cov.dot(fit.beta) + fit.beta.dot(gram * fit.beta);
    rss.push_back(std::max(per_row, 0.0) * n);
    warm = fit.beta;
    betas.push_back(std::move(fit.beta));
  }
}

ColumnPath column_path(const Matrix& moments_pre, int n_pre, const Matrix& moments_post,
                       int n_post, int j, std::span<const double> lambdas,
                       const LassoConfig& cfg) {
  ColumnPath path;
  segment_path(moments_pre, n_pre, j, lambdas, cfg, path.pre, path.rss_pre, path.unconverged);
  segment_path(moments_post, n_post, j, lambdas, cfg, path.post, path.rss_post, path.unconverged);
  return path;
}

double row_cost(const Matrix& z, Eigen::Index t, const EdgeEstimates& e) {
  double total = 0.0;
  const int p = e.dimension();
  for (int j = 0; j < p; ++j) {
    double fitted = 0.0;
    const Vector& beta = e.coefficients[j];
    for (int col : e.supports[j]) fitted += z(t, col) * beta(position_of(j, col));
    const double r = z(t, j) - fitted;
    total += r * r;
  }
  return total;
}

void check_families(const Matrix& z, const EdgeEstimates& mu, const EdgeEstimates& gamma) {
  if (mu.dimension() != z.cols() || gamma.dimension() != z.cols())
    fail(ErrorKind::DimensionMismatch, "edge estimates do not match the data dimension");
}

/// Standard normals from the polar method, two per accepted pair.
class NormalPairs {
 public:
  explicit NormalPairs(Rng& rng) : rng_(rng) {}
  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    for (;;) {
      const double u = 2.0 * rng_.uniform() - 1.0;
      const double v = 2.0 * rng_.uniform() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
      }
    }
  }

 private:
  Rng& rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

PathExtremum drift_path(int steps, double step, const Rng& base, int i) {
  Rng rng = base.child(static_cast<std::uint64_t>(i));
  NormalPairs normals(rng);
  const double sd = 2.0 * std::sqrt(step);
  double x = 0.0;
  PathExtremum ext;
  for (int s = 1; s <= steps; ++s) {
    x += sd * normals.next() - step;
    if (x > ext.sup) {
      ext.sup = x;
      ext.location = s * step;
    }
  }
  return ext;
}

struct BranchMax {
  double value = 0.0;
  int location = 0;
};

BranchMax walk_branch(int horizon, const IncrementLaw& law, Rng& rng) {
  std::chi_squared_distribution<double> chi(static_cast<double>(law.df));
  const double df = static_cast<double>(law.df);
  const double scale = law.sd / std::sqrt(2.0 * df);
  double c = 0.0;
  BranchMax best;
  for (int t = 1; t <= horizon; ++t) {
    c += law.mean - scale * (chi(rng) - df);
    if (c > best.value) {
      best.value = c;
      best.location = t;
    }
  }
  return best;
}

int walk_path(int horizon, const IncrementLaw& left, const IncrementLaw& right, const Rng& base,
              int i) {
  const Rng rng = base.child(static_cast<std::uint64_t>(i));
  Rng left_rng = rng.child(0);
  Rng right_rng = rng.child(1);
  const BranchMax l = walk_branch(horizon, left, left_rng);
  const BranchMax r = walk_branch(horizon, right, right_rng);
  if (l.value > r.value) return -l.location;
  if (r.value > l.value) return r.location;
  return r.location < l.location ? r.location : -l.location;
}

int steps_for(double step, double horizon) {
  require(step > 0.0 && horizon > step, "drift pool: need 0 < step < horizon");
  return static_cast<int>(std::llround(horizon / step));
}

}  // namespace

std::vector<ColumnPath> neighborhood_paths(const Matrix& moments_pre, int n_pre,
                                           const Matrix& moments_post, int n_post,
                                           std::span<const double> lambdas,
                                           const LassoConfig& cfg) {
  const int p = static_cast<int>(moments_pre.rows());
  std::vector<ColumnPath> out(p);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < p; ++j)
    out[j] = column_path(moments_pre, n_pre, moments_post, n_post, j, lambdas, cfg);
  return out;
}

RowCosts row_costs(const Matrix& z, const EdgeEstimates& mu, const EdgeEstimates& gamma) {
  check_families(z, mu, gamma);
  const Eigen::Index T = z.rows();
  RowCosts out{Vector(T), Vector(T)};
#pragma omp parallel for schedule(static)
  for (Eigen::Index t = 0; t < T; ++t) {
    out.mu(t) = row_cost(z, t, mu);
    out.gamma(t) = row_cost(z, t, gamma);
  }
  return out;
}

std::vector<PathExtremum> drift_pool(int n_paths, double step, double horizon, const Rng& rng) {
  const int steps = steps_for(step, horizon);
  std::vector<PathExtremum> out(n_paths);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_paths; ++i) out[i] = drift_path(steps, step, rng, i);
  return out;
}

std::vector<int> walk_argmax(int n_paths, int horizon, const IncrementLaw& left,
                             const IncrementLaw& right, const Rng& rng) {
  std::vector<int> out(n_paths);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_paths; ++i) out[i] = walk_path(horizon, left, right, rng, i);
  return out;
}

namespace serial {

std::vector<ColumnPath> neighborhood_paths(const Matrix& moments_pre, int n_pre,
                                           const Matrix& moments_post, int n_post,
                                           std::span<const double> lambdas,
                                           const LassoConfig& cfg) {
  const int p = static_cast<int>(moments_pre.rows());
  std::vector<ColumnPath> out(p);
  for (int j = 0; j < p; ++j)
    out[j] = column_path(moments_pre, n_pre, moments_post, n_post, j, lambdas, cfg);
  return out;
}

RowCosts row_costs(const Matrix& z, const EdgeEstimates& mu, const EdgeEstimates& gamma) {
  check_families(z, mu, gamma);
  const Eigen::Index T = z.rows();
  RowCosts out{Vector(T), Vector(T)};
  for (Eigen::Index t = 0; t < T; ++t) {
    out.mu(t) = row_cost(z, t, mu);
    out.gamma(t) = row_cost(z, t, gamma);
  }
  return out;
}

std::vector<PathExtremum> drift_pool(int n_paths, double step, double horizon, const Rng& rng) {
  const int steps = steps_for(step, horizon);
  std::vector<PathExtremum> out(n_paths);
  for (int i = 0; i < n_paths; ++i) out[i] = drift_path(steps, step, rng, i);
  return out;
}

std::vector<int> walk_argmax(int n_paths, int horizon, const IncrementLaw& left,
                             const IncrementLaw& right, const Rng& rng) {
  std::vector<int> out(n_paths);
  for (int i = 0; i < n_paths; ++i) out[i] = walk_path(horizon, left, right, rng, i);
  return out;
}

}  // namespace serial
}  // namespace gcpd::kernels
