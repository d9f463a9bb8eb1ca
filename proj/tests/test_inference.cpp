#include <cmath>
#include <random>

#include "doctest.h"
#include "gcpd/error.hpp"
#include "gcpd/inference.hpp"
#include "gcpd/simulate.hpp"
#include "oracles.hpp"

using namespace gcpd;

namespace {

ZetaSeries zeta_oracle(const Matrix& z, int k, const EdgeEstimates& mu, const EdgeEstimates& gamma,
                       const std::vector<Vector>& eta, double xi22) {
  const int T = static_cast<int>(z.rows()), p = static_cast<int>(z.cols());
  ZetaSeries out;
  out.split_index = k;
  out.linear_part = Vector::Zero(T);
  out.full_part = Vector::Zero(T);
  for (int t = 0; t < T; ++t) {
    const EdgeEstimates& beta = t < k ? mu : gamma;
    for (int j = 0; j < p; ++j) {
      double fitted = 0.0, jump = 0.0;
      int pos = 0;
      for (int m = 0; m < p; ++m) {
        if (m == j) continue;
        fitted += z(t, m) * beta.coefficients[j](pos);
        jump += z(t, m) * eta[j](pos);
        ++pos;
      }
      const double eps = z(t, j) - fitted;
      out.linear_part(t) += eps * jump;
      out.full_part(t) += 2.0 * eps * jump - jump * jump;
    }
    out.linear_part(t) /= xi22 * std::sqrt(static_cast<double>(p));
    out.full_part(t) /= p;
  }
  return out;
}

std::vector<Vector> differences(const EdgeEstimates& a, const EdgeEstimates& b) {
  std::vector<Vector> eta;
  for (int j = 0; j < a.dimension(); ++j) eta.push_back(a.coefficients[j] - b.coefficients[j]);
  return eta;
}

}  // namespace

TEST_CASE("regime names round-trip") {
  CHECK(regime_from_string(to_string(Regime::Vanishing)) == Regime::Vanishing);
  CHECK(regime_from_string(to_string(Regime::NonVanishing)) == Regime::NonVanishing);
  CHECK(regime_from_string("nonvanishing") == Regime::NonVanishing);
  CHECK_THROWS_AS(regime_from_string("other"), Error);
}

TEST_CASE("refit equals OLS on the support, with singular fallback") {
  Rng rng(41);
  Matrix z = oracle::random_matrix(60, 5, rng);
  z.col(4) = z.col(3);  // duplicated column makes some supports singular
  EdgeEstimates mu = EdgeEstimates::zeros(5), gamma = EdgeEstimates::zeros(5);
  mu.coefficients[0] << 0.3, 0.0, -0.2, 0.0;           // columns 1, 3
  mu.coefficients[1] << 0.1, 0.0, 0.4, 0.4;            // columns 0, 3, 4: singular
  gamma.coefficients[2] << 0.0, 0.5, 0.0, 0.0;         // column 1
  mu.refresh_supports();
  gamma.refresh_supports();
  const RefitResult r = refit(z, 25, mu, gamma);

  const Matrix pre = z.topRows(25);
  const Vector expect0 = ols_on_support(pre, pre.col(0), mu.supports[0]);
  CHECK(r.mu.coefficients[0](0) == doctest::Approx(expect0(1)).epsilon(1e-10));
  CHECK(r.mu.coefficients[0](2) == doctest::Approx(expect0(3)).epsilon(1e-10));
  CHECK(r.mu.coefficients[0](1) == 0.0);
  CHECK(r.fallback_mu == std::vector<int>{1});
  CHECK(r.mu.coefficients[1] == mu.coefficients[1]);

  const Matrix post = z.bottomRows(35);
  const Vector expect2 = ols_on_support(post, post.col(2), gamma.supports[2]);
  CHECK(r.gamma.coefficients[2](1) == doctest::Approx(expect2(1)).epsilon(1e-10));
  CHECK(r.gamma.coefficients[3].isZero(0.0));
}

TEST_CASE("jump statistics and drift estimates") {
  Rng rng(42);
  const EdgeEstimates a = oracle::random_edges(6, 0.5, rng);
  const EdgeEstimates b = oracle::random_edges(6, 0.5, rng);
  const JumpStats js = jump_stats(a, b);
  double sq = 0.0;
  for (const auto& v : differences(a, b)) sq += v.squaredNorm();
  CHECK(js.xi22 == doctest::Approx(std::sqrt(sq)).epsilon(1e-14));
  CHECK(js.psi == js.xi22 / std::sqrt(6.0));

  const Matrix z = oracle::random_matrix(50, 6, rng);
  const DriftEstimates d = drift_estimates(js.eta, z, 20, js.xi22);
  for (auto [begin, end, value] : {std::tuple{0, 20, d.sigma1_sq}, std::tuple{20, 50, d.sigma2_sq}}) {
    const Matrix seg = z.middleRows(begin, end - begin);
    const Matrix c = (seg.rowwise() - seg.colwise().mean()).transpose() *
                     (seg.rowwise() - seg.colwise().mean()) / static_cast<double>(end - begin);
    double total = 0.0;
    for (int j = 0; j < 6; ++j)
      for (int r = 0, rp = 0; r < 6; ++r) {
        if (r == j) continue;
        for (int s = 0, sp = 0; s < 6; ++s) {
          if (s == j) continue;
          total += js.eta[j](rp) * c(r, s) * js.eta[j](sp);
          ++sp;
        }
        ++rp;
      }
    CHECK(value == doctest::Approx(total / sq).epsilon(1e-12));
  }
  CHECK_THROWS_AS(drift_estimates(js.eta, z, 20, 0.0), Error);
}

TEST_CASE("zeta series matches a triple-loop oracle") {
  Rng rng(43);
  for (int instance = 0; instance < 20; ++instance) {
    const int T = 15 + instance, p = 2 + instance % 5;
    const Matrix z = oracle::random_matrix(T, p, rng);
    const EdgeEstimates mu = oracle::random_edges(p, 0.6, rng);
    const EdgeEstimates gamma = oracle::random_edges(p, 0.6, rng);
    const JumpStats js = jump_stats(mu, gamma);
    if (js.xi22 == 0.0) continue;
    const int k = T / 3;
    const ZetaSeries got = zeta_series(z, k, mu, gamma, js.eta, js.xi22);
    const ZetaSeries want = zeta_oracle(z, k, mu, gamma, js.eta, js.xi22);
    CHECK((got.linear_part - want.linear_part).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((got.full_part - want.full_part).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(got.split_index == k);
  }
  // Zero jump vectors with the norm forced to one: both series vanish.
  const Matrix z = oracle::random_matrix(12, 3, rng);
  const EdgeEstimates e = oracle::random_edges(3, 0.7, rng);
  const ZetaSeries zero = zeta_series(z, 6, e, e, differences(e, e), 1.0);
  CHECK(zero.linear_part.isZero(0.0));
  CHECK(zero.full_part.isZero(0.0));
}

TEST_CASE("variance estimates use the segment length and ignore shifts") {
  ZetaSeries zs;
  zs.split_index = 3;
  zs.linear_part = Vector(7);
  zs.full_part = Vector(7);
  zs.linear_part << 1, 2, 3, 10, 10, 14, 14;
  zs.full_part << 0, 0, 3, 1, 1, 1, 5;
  const SegmentVariances v = variance_estimates(zs);
  CHECK(v.sigma1_star_sq == doctest::Approx(2.0 / 3.0));
  CHECK(v.sigma2_star_sq == doctest::Approx(4.0));
  CHECK(v.bar_sigma1_sq == doctest::Approx(2.0));
  CHECK(v.bar_sigma2_sq == doctest::Approx(3.0));
  ZetaSeries shifted = zs;
  shifted.linear_part.array() += 100.0;
  shifted.full_part.array() -= 7.5;
  const SegmentVariances w = variance_estimates(shifted);
  CHECK(w.sigma1_star_sq == doctest::Approx(v.sigma1_star_sq));
  CHECK(w.bar_sigma2_sq == doctest::Approx(v.bar_sigma2_sq));
}

TEST_CASE("increment law fit") {
  CHECK(neg_scaled_chisq_cdf(0.0, 4) == doctest::Approx(1.0 - chisq_cdf(4.0, 4)));
  CHECK(default_df_grid().size() == 100);

  std::mt19937_64 gen(5);
  const int n = 3000;
  ZetaSeries zs;
  zs.split_index = 1000;
  zs.linear_part = Vector::Zero(n);
  zs.full_part = Vector(n);
  std::chi_squared_distribution<double> chi(6.0);
  for (int t = 0; t < n; ++t) {
    const double x = -(chi(gen) - 6.0) / std::sqrt(12.0);
    zs.full_part(t) = t < 1000 ? 2.0 * x - 1.0 : 0.5 * x + 3.0;
  }
  const auto grid = default_df_grid();
  const IncrementLawFit fit = fit_increment_law(zs, grid);
  CHECK(fit.df >= 4);
  CHECK(fit.df <= 9);
  CHECK(fit.ks_pvalue > 0.05);

  std::normal_distribution<double> normal;
  for (int t = 0; t < n; ++t) zs.full_part(t) = normal(gen);
  CHECK(fit_increment_law(zs, grid).df >= 30);

  zs.full_part.head(1000).setConstant(1.0);
  CHECK_THROWS_AS(fit_increment_law(zs, grid), Error);
}

TEST_CASE("confidence intervals") {
  RegimeParams params;
  params.psi = 0.5;
  params.sigma1_sq = 2.0;
  params.sigma1_star_sq = 0.3;
  const ConfidenceInterval v = confidence_interval(100, params, Regime::Vanishing, 0.05, 11.0);
  CHECK(v.margin == doctest::Approx(11.0 * 0.3 / (4.0 * 0.25)));
  CHECK(v.lo == doctest::Approx(100 - v.margin));
  CHECK(v.hi == doctest::Approx(100 + v.margin));
  CHECK(v.contains(100));
  const ConfidenceInterval nv = confidence_interval(100, params, Regime::NonVanishing, 0.05, 2.0);
  CHECK(nv.lo == 98.0);
  CHECK(nv.hi == 102.0);
  CHECK(nv.contains(98.0));
  CHECK(!nv.contains(97.0));
  // Wider quantile at smaller α means a wider interval.
  CHECK(confidence_interval(100, params, Regime::Vanishing, 0.01, 19.0).margin > v.margin);

  RegimeParams zero;
  CHECK_THROWS_AS(confidence_interval(100, zero, Regime::Vanishing, 0.05, 11.0), Error);
  CHECK_THROWS_AS(confidence_interval(100, params, Regime::Vanishing, 1.5, 11.0), Error);
}

TEST_CASE("regime parameters on simulated data") {
  const ScenarioConfig sc = standard_scenario(300, 25, 0.2, 2024);
  const Matrix z = generate_series(sc);
  const ChangePointFit fit = algorithm1(z, default_init_grid(), LassoConfig{});
  const RegimeParams p = estimate_regime_params(z, fit);
  CHECK(p.psi == p.xi22 / 5.0);
  CHECK(p.psi > 0.1);
  CHECK(p.sigma1_sq > 0.0);
  CHECK(p.sigma2_sq > 0.0);
  CHECK(p.sigma1_star_sq > 0.0);
  CHECK(p.bar_sigma1_sq > 0.0);
  CHECK(p.df >= 1);
  CHECK(p.ks_pvalue >= 0.0);
  CHECK(p.ks_pvalue <= 1.0);

  // Equal lasso families are not enough (the refit differs by segment); empty
  // supports refit to zero on both sides.
  ChangePointFit flat = fit;
  flat.edges_step2.mu = flat.edges_step2.gamma = EdgeEstimates::zeros(25);
  try {
    estimate_regime_params(z, flat);
    FAIL("expected ZeroJump");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroJump);
  }
}
