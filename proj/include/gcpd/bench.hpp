#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "gcpd/changepoint.hpp"
#include "gcpd/inference.hpp"
#include "gcpd/quantiles.hpp"
#include "gcpd/simulate.hpp"

namespace gcpd {

struct CoverageCell {
  Regime regime = Regime::Vanishing;
  double alpha = 0.05;
  double coverage = 0.0;
  double avg_margin = 0.0;
  int evaluated = 0;  // replicates with an interval in this cell
};

struct BenchmarkReport {
  ScenarioConfig scenario;
  int replications = 0;
  double bias = 0.0;
  double rmse = 0.0;
  /// Non-vanishing cells first, then vanishing; α in the order requested.
  std::vector<CoverageCell> cells;
  /// Failure reason → count. Failed replicates are excluded from coverage.
  std::map<std::string, int> failures;
  /// k̃ per replicate (−1 when estimation itself failed).
  std::vector<int> estimates;

  int failed() const;
  const CoverageCell* cell(Regime regime, double alpha) const;
};

struct BenchOptions {
  LassoConfig lasso;
  std::vector<double> init_grid = default_init_grid();
  InferenceOptions inference;
  VanishingMcConfig vanishing;
  NonVanishingMcConfig nonvanishing;
};

/// Replicate r simulates `scenario` with its seed replaced by a draw from
/// master.child(r). The vanishing-regime path pool is simulated once per call;
/// the non-vanishing walks are simulated per replicate.
BenchmarkReport run_replications(const ScenarioConfig& scenario, int replications,
                                 std::span<const double> alphas, const Rng& master,
                                 const BenchOptions& options = {});

enum class TableFormat { Csv, Markdown, Json };

TableFormat table_format_from_string(const std::string& name);

std::string emit_table(std::span<const BenchmarkReport> reports, TableFormat format);

/// Reads back the CSV produced by emit_table. Values carry the table's rounding;
/// per-replicate estimates and failure reasons are not part of the table.
std::vector<BenchmarkReport> parse_table_csv(const std::string& text);

}  // namespace gcpd
