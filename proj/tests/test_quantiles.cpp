#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "gcpd/error.hpp"
#include "gcpd/quantiles.hpp"

using namespace gcpd;

namespace {

double median(std::vector<double> v) { return empirical_quantile(std::move(v), 0.5); }

double fraction_at_most(const std::vector<double>& v, double x) {
  return static_cast<double>(std::count_if(v.begin(), v.end(), [x](double d) { return d <= x; })) /
         v.size();
}

RegimeParams walk_params(double psi, double drift, double noise, int df) {
  RegimeParams p;
  p.psi = psi;
  p.sigma1_sq = p.sigma2_sq = drift;
  p.bar_sigma1_sq = p.bar_sigma2_sq = noise;
  p.df = df;
  return p;
}

}  // namespace

TEST_CASE("empirical quantile") {
  const std::vector<double> v{5, 1, 4, 2, 3};
  CHECK(empirical_quantile(v, 0.2) == 1);
  CHECK(empirical_quantile(v, 0.21) == 2);
  CHECK(empirical_quantile(v, 0.6) == 3);
  CHECK(empirical_quantile(v, 1.0) == 5);
  std::vector<double> hundred(100);
  for (int i = 0; i < 100; ++i) hundred[i] = i + 1;
  CHECK(empirical_quantile(hundred, 0.95) == 95);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), Error);
}

TEST_CASE("symmetric closed form") {
  CHECK(symmetric_argmax_cdf(0.0) == 0.5);
  CHECK(symmetric_argmax_cdf(-3.0) == doctest::Approx(1.0 - symmetric_argmax_cdf(3.0)));
  double previous = 0.0;
  for (double x = -40.0; x <= 40.0; x += 0.5) {
    const double g = symmetric_argmax_cdf(x);
    CHECK(g >= previous - 1e-12);
    previous = g;
  }
  CHECK(symmetric_argmax_cdf(200.0) == doctest::Approx(1.0).epsilon(1e-9));
  // Bai's tabulated 97.5% point.
  CHECK(symmetric_argmax_cdf(11.03) == doctest::Approx(0.975).epsilon(1e-3));
}

TEST_CASE("vanishing regime: symmetric MC against the closed form") {
  VanishingMcConfig cfg;
  cfg.n_paths = 20000;
  cfg.seed = 3;
  const VanishingArgmaxSampler sampler(cfg);
  CHECK(sampler.escape_fraction() <= kMaxEscapeFraction);
  const VanishingRatios unit{};
  const std::vector<double> draws = sampler.draws(unit);
  CHECK(std::abs(median(draws)) <= 0.05);
  const std::vector<double> abs_draws = [&] {
    std::vector<double> a(draws.size());
    std::transform(draws.begin(), draws.end(), a.begin(), [](double d) { return std::abs(d); });
    return a;
  }();
  for (double alpha : {0.1, 0.05, 0.01}) {
    const double q = sampler.quantiles(std::vector<double>{alpha}, unit).front();
    // P(|argmax| ≤ q) = 2G(q) − 1 for the symmetric law.
    CHECK(2.0 * symmetric_argmax_cdf(q) - 1.0 == doctest::Approx(1.0 - alpha).epsilon(0.02));
    CHECK(fraction_at_most(abs_draws, q) >= 1.0 - alpha);
  }
}

TEST_CASE("vanishing regime: rescaled pool agrees with direct simulation") {
  VanishingMcConfig cfg;
  cfg.n_paths = 6000;
  cfg.step = 0.02;
  cfg.horizon = 60.0;
  cfg.seed = 11;
  const VanishingArgmaxSampler sampler(cfg);
  for (const VanishingRatios ratios : {VanishingRatios{2.0, 1.0}, VanishingRatios{1.2, 1.6},
                                       VanishingRatios{3.0, 0.8}}) {
    const std::vector<double> alphas{0.1, 0.05};
    const auto pooled = sampler.quantiles(alphas, ratios);
    // The argmax spreads over a²/4b² reference units; widen the direct window to match.
    const double stretch = std::max(1.0, ratios.scale * ratios.scale / (4.0 * ratios.drift * ratios.drift));
    std::vector<double> direct =
        vanishing_argmax_direct(ratios, 6000, 0.02, 60.0 * stretch, Rng(99));
    for (double& d : direct) d = std::abs(d);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const double q_direct = empirical_quantile(direct, 1.0 - alphas[i]);
      CHECK(pooled[i] == doctest::Approx(q_direct).epsilon(0.1));
    }
  }
}

TEST_CASE("vanishing regime: ratios, stability across seeds and monotonicity") {
  const VanishingRatios r = vanishing_ratios(0.04, 0.09, 2.0, 3.0);
  CHECK(r.scale == doctest::Approx(2.0 * 1.5));
  CHECK(r.drift == doctest::Approx(1.5));
  CHECK_THROWS_AS(vanishing_ratios(0.04, 0.09, 0.0, 3.0), Error);

  const std::vector<double> alphas{0.1, 0.05, 0.01};
  std::vector<std::vector<double>> by_seed;
  for (std::uint64_t seed : {1, 2, 3}) {
    VanishingMcConfig cfg;
    cfg.seed = seed;
    by_seed.push_back(VanishingArgmaxSampler(cfg).quantiles(alphas, {}));
  }
  for (const auto& q : by_seed) {
    CHECK(q[0] < q[1]);
    CHECK(q[1] < q[2]);
  }
  for (std::size_t i = 0; i < 2; ++i)  // the 1% tail is the noisiest; checked at 5%
    for (const auto& q : by_seed) CHECK(q[i] == doctest::Approx(by_seed[0][i]).epsilon(0.05));

  VanishingMcConfig same;
  same.seed = 8;
  CHECK(VanishingArgmaxSampler(same).draws({}) == VanishingArgmaxSampler(same).draws({}));
}

TEST_CASE("vanishing regime: horizon check") {
  VanishingMcConfig cfg;
  cfg.n_paths = 2000;
  cfg.horizon = 2.0;
  cfg.step = 0.01;
  cfg.adaptive = false;
  try {
    VanishingArgmaxSampler sampler(cfg);
    FAIL("expected HorizonTooSmall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::HorizonTooSmall);
  }
  cfg.adaptive = true;
  cfg.max_doublings = 6;
  const VanishingArgmaxSampler grown(cfg);
  CHECK(grown.horizon() > 2.0);
  CHECK(grown.escape_fraction() <= kMaxEscapeFraction);
}

TEST_CASE("non-vanishing regime") {
  NonVanishingMcConfig cfg;
  cfg.seed = 4;
  const std::vector<double> alphas{0.1, 0.05, 0.01};

  // Drift dominates the noise: the walk never climbs above C(0) = 0.
  const auto dominant = nonvanishing_quantiles(walk_params(3.0, 2.0, 0.01, 5), alphas, cfg);
  for (int q : dominant) CHECK(q == 0);

  const auto q = nonvanishing_quantiles(walk_params(0.3, 1.0, 1.0, 5), alphas, cfg);
  CHECK(q[0] <= q[1]);
  CHECK(q[1] <= q[2]);
  CHECK(q[2] > 0);
  CHECK(quantile_nonvanishing(0.05, walk_params(0.3, 1.0, 1.0, 5), cfg) == q[1]);
  CHECK(nonvanishing_quantiles(walk_params(0.3, 1.0, 1.0, 5), alphas, cfg) == q);

  const WalkLaws laws = walk_laws(walk_params(0.5, 2.0, 4.0, 7));
  CHECK(laws.left.mean == doctest::Approx(-0.5));
  CHECK(laws.left.sd == doctest::Approx(2.0));
  CHECK(laws.right.df == 7);
  CHECK_THROWS_AS(walk_laws(walk_params(0.0, 1.0, 1.0, 5)), Error);

  NonVanishingMcConfig tight = cfg;
  tight.horizon = 5;
  tight.adaptive = false;
  try {
    nonvanishing_quantiles(walk_params(0.05, 1.0, 1.0, 5), alphas, tight);
    FAIL("expected HorizonTooSmall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::HorizonTooSmall);
  }
}
