#include "gcpd/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "gcpd/error.hpp"

namespace gcpd {

std::string to_string(CovarianceKind kind) {
  return kind == CovarianceKind::ToeplitzBlockSign ? "ToeplitzBlockSign" : "Banded";
}

CovarianceKind covariance_kind_from_string(const std::string& name) {
  if (name == "ToeplitzBlockSign") return CovarianceKind::ToeplitzBlockSign;
  if (name == "Banded") return CovarianceKind::Banded;
  fail(ErrorKind::InvalidArgument, "unknown covariance kind '" + name + "'");
}

void ScenarioConfig::validate() const {
  require(p >= 2, "scenario: p must be at least 2");
  require(tau0 > 0.0 && tau0 < 1.0, "scenario: tau0 must lie in (0,1)");
  require(sigma_spec.p == p && delta_spec.p == p, "scenario: covariance dimensions must equal p");
  const int k0 = change_index();
  require(k0 >= 2 && T - k0 >= 2, "scenario: both segments need at least two rows");
}

Matrix build_pre_covariance(int p, int s, double rho) {
  require(p >= 2, "pre covariance: p must be at least 2");
  require(s >= 1 && s <= p, "pre covariance: block width must lie in [1, p]");
  require(rho >= 0.0 && rho < 1.0, "pre covariance: rho must lie in [0, 1)");
  const double a = s >= 2 ? 1.0 / std::log(static_cast<double>(s)) : 1.0;
  Matrix sigma = Matrix::Zero(p, p);
  for (int l = 0; l < p; ++l) {
    for (int m = 0; m < p; ++m) {
      if (l / s != m / s) continue;
      const int lag = std::abs(l - m);
      const double gamma = lag == 0 ? 1.0 : std::pow(rho, std::pow(static_cast<double>(lag), a));
      const int i = l % s;
      const int j = m % s;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      sigma(l, m) = sign * gamma;
    }
  }
  cholesky(sigma);
  return sigma;
}

Matrix build_post_covariance(int p, int s, double rho2) {
  require(p >= 2, "post covariance: p must be at least 2");
  require(s >= 1 && s < p, "post covariance: band width must lie in [1, p)");
  Matrix delta = Matrix::Identity(p, p);
  for (int d = 1; d <= s; ++d) {
    const double v = rho2 * static_cast<double>(s - d + 1) / static_cast<double>(s);
    for (int l = 0; l + d < p; ++l) {
      delta(l, l + d) = v;
      delta(l + d, l) = v;
    }
  }
  cholesky(delta);
  return delta;
}

Matrix build_covariance(const CovarianceSpec& spec) {
  return spec.kind == CovarianceKind::ToeplitzBlockSign
             ? build_pre_covariance(spec.p, spec.s, spec.rho)
             : build_post_covariance(spec.p, spec.s, spec.rho);
}

Matrix generate_series(const ScenarioConfig& cfg) {
  cfg.validate();
  const Matrix sigma = build_covariance(cfg.sigma_spec);
  const Matrix delta = build_covariance(cfg.delta_spec);
  const int k0 = cfg.change_index();
  Rng rng(cfg.seed);
  Rng pre_rng = rng.child(0);
  Rng post_rng = rng.child(1);
  Matrix z(cfg.T, cfg.p);
  z.topRows(k0) = sample_mvn(cholesky(sigma), k0, pre_rng);
  z.bottomRows(cfg.T - k0) = sample_mvn(cholesky(delta), cfg.T - k0, post_rng);
  return z;
}

ScenarioConfig standard_scenario(int T, int p, double tau0, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.T = T;
  cfg.p = p;
  cfg.tau0 = tau0;
  cfg.seed = seed;
  const int s_pre = std::max(2, static_cast<int>(std::lround(0.15 * p)));
  const int s_post = std::clamp(static_cast<int>(std::lround(0.2 * p)), 1, p - 1);
  cfg.sigma_spec = {p, std::min(s_pre, p), 0.4, CovarianceKind::ToeplitzBlockSign};
  cfg.delta_spec = {p, s_post, 0.5, CovarianceKind::Banded};
  return cfg;
}

}  // namespace gcpd
