#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "gcpd/bench.hpp"
#include "gcpd/error.hpp"

using namespace gcpd;

namespace {

BenchOptions quick_options() {
  BenchOptions o;
  o.vanishing.n_paths = 2000;
  o.nonvanishing.n_paths = 500;
  o.nonvanishing.horizon = 300;
  o.lasso.lambda_grid = default_lambda_grid(25);
  return o;
}

const std::vector<double> kAlphas{0.1, 0.05, 0.01};

}  // namespace

TEST_CASE("single replicate: bias and rmse equal the absolute error") {
  const ScenarioConfig sc = standard_scenario(120, 8, 0.4, 0);
  const BenchmarkReport r = run_replications(sc, 1, kAlphas, Rng(5), quick_options());
  REQUIRE(r.estimates.size() == 1);
  REQUIRE(r.estimates[0] >= 0);
  const double err = std::abs(r.estimates[0] - sc.change_index());
  CHECK(r.bias == err);
  CHECK(r.rmse == err);
  CHECK(r.cells.size() == 6);
  CHECK(r.cells[0].regime == Regime::NonVanishing);
  CHECK(r.cells[3].regime == Regime::Vanishing);
}

TEST_CASE("report invariants and determinism") {
  const ScenarioConfig sc = standard_scenario(120, 8, 0.4, 0);
  const BenchmarkReport a = run_replications(sc, 6, kAlphas, Rng(9), quick_options());
  const BenchmarkReport b = run_replications(sc, 6, kAlphas, Rng(9), quick_options());
  CHECK(a.estimates == b.estimates);
  CHECK(a.bias == b.bias);
  CHECK(a.rmse >= a.bias);
  for (const auto& c : a.cells) {
    CHECK(c.coverage >= 0.0);
    CHECK(c.coverage <= 1.0);
    CHECK(c.evaluated == 6 - a.failed());
  }
  for (Regime regime : {Regime::Vanishing, Regime::NonVanishing}) {
    CHECK(a.cell(regime, 0.01)->coverage >= a.cell(regime, 0.05)->coverage);
    CHECK(a.cell(regime, 0.05)->coverage >= a.cell(regime, 0.1)->coverage);
    CHECK(a.cell(regime, 0.01)->avg_margin >= a.cell(regime, 0.1)->avg_margin);
  }
  CHECK(emit_table(std::span(&a, 1), TableFormat::Json) == emit_table(std::span(&b, 1), TableFormat::Json));
  CHECK_THROWS_AS(run_replications(sc, 0, kAlphas, Rng(9)), Error);
}

TEST_CASE("null scenario failures are counted, not fatal") {
  ScenarioConfig sc = standard_scenario(80, 5, 0.5, 0);
  sc.delta_spec = {5, 1, 0.0, CovarianceKind::Banded};
  sc.sigma_spec = {5, 1, 0.0, CovarianceKind::ToeplitzBlockSign};
  const BenchmarkReport r = run_replications(sc, 4, kAlphas, Rng(2), quick_options());
  CHECK(r.replications == 4);
  for (const auto& c : r.cells) CHECK(c.evaluated + r.failed() == 4);
}

TEST_CASE("tables: csv round trip, markdown shape") {
  BenchmarkReport a;
  a.scenario = standard_scenario(300, 25, 0.2, 0);
  a.replications = 200;
  a.bias = 0.0161;
  a.rmse = 0.24549;
  a.failures["ZeroJump"] = 2;
  const double covs[] = {0.951, 0.972, 0.994, 0.9449, 0.96, 1.0};
  const double mes[] = {0.4, 0.61, 1.2, 0.2144, 0.31111, 0.5};
  int i = 0;
  for (Regime regime : {Regime::NonVanishing, Regime::Vanishing})
    for (double alpha : kAlphas) {
      a.cells.push_back({regime, alpha, covs[i], mes[i], 198});
      ++i;
    }
  BenchmarkReport b = a;
  b.scenario = standard_scenario(300, 50, 0.4, 0);
  b.bias = 0.006;
  const std::vector<BenchmarkReport> reports{a, b};

  const std::string csv = emit_table(reports, TableFormat::Csv);
  const auto parsed = parse_table_csv(csv);
  REQUIRE(parsed.size() == 2);
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(parsed[r].scenario.T == reports[r].scenario.T);
    CHECK(parsed[r].scenario.p == reports[r].scenario.p);
    CHECK(parsed[r].scenario.tau0 == reports[r].scenario.tau0);
    CHECK(parsed[r].replications == 200);
    CHECK(parsed[r].failed() == 2);
    CHECK(std::abs(parsed[r].bias - reports[r].bias) <= 0.0005 + 1e-12);
    CHECK(std::abs(parsed[r].rmse - reports[r].rmse) <= 0.0005 + 1e-12);
    REQUIRE(parsed[r].cells.size() == 6);
    for (std::size_t c = 0; c < 6; ++c) {
      CHECK(parsed[r].cells[c].regime == reports[r].cells[c].regime);
      CHECK(parsed[r].cells[c].alpha == reports[r].cells[c].alpha);
      CHECK(std::abs(parsed[r].cells[c].coverage - reports[r].cells[c].coverage) <= 0.005 + 1e-12);
      CHECK(std::abs(parsed[r].cells[c].avg_margin - reports[r].cells[c].avg_margin) <= 0.0005 + 1e-12);
    }
  }
  CHECK(csv.find("\n300,25,0.016,0.245,0.95,0.400,") != std::string::npos);

  const std::string md = emit_table(reports, TableFormat::Markdown);
  CHECK(std::count(md.begin(), md.end(), '\n') == 2 + 2);
  CHECK(md.find("0.94 (0.214)") != std::string::npos);
  CHECK(table_format_from_string("markdown") == TableFormat::Markdown);
  CHECK_THROWS_AS(table_format_from_string("xml"), Error);
  CHECK_THROWS_AS(emit_table(std::vector<BenchmarkReport>{}, TableFormat::Csv), Error);
}
