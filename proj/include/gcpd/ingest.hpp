#pragma once

#include <string>
#include <vector>

#include "gcpd/csv.hpp"

namespace gcpd {

/// Count table to log-ratio data matrix.
struct IngestConfig {
  std::string input;
  std::string reference_column;
  double prevalence_threshold = 0.35;
  /// Covariate used to order the rows; empty keeps file order.
  std::string sort_by;
  double pseudocount = 0.5;
  /// Metadata columns that are neither counts nor the sort covariate.
  std::vector<std::string> exclude_columns;

  void validate() const;
};

struct IngestResult {
  std::vector<std::string> names;  // retained count columns, reference excluded
  Matrix z;
  std::vector<double> covariate;   // sorted sort_by values (empty when unsorted)
  std::vector<std::string> dropped;
  int retained_with_reference = 0;
  double pseudocount = 0.5;
};

/// Drops count columns present (count > 0) in fewer than the threshold fraction
/// of samples, then z_tj = log((c_tj + pc)/(c_t,ref + pc)), rows ordered by the
/// covariate (stable).
IngestResult ingest_table(const CsvTable& table, const IngestConfig& cfg);
IngestResult ingest(const IngestConfig& cfg);

}  // namespace gcpd
