#include "gcpd/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcpd/error.hpp"

namespace gcpd {

void IngestConfig::validate() const {
  require(prevalence_threshold > 0.0 && prevalence_threshold <= 1.0,
          "prevalence threshold must lie in (0,1]");
  require(pseudocount >= 0.0, "pseudocount must be nonnegative");
  require(!reference_column.empty(), "a reference column is required");
}

IngestResult ingest_table(const CsvTable& table, const IngestConfig& cfg) {
  cfg.validate();
  const int ref = table.column(cfg.reference_column);
  if (ref < 0) fail(ErrorKind::MissingColumn, "reference column '" + cfg.reference_column + "' not found");
  int sort_col = -1;
  if (!cfg.sort_by.empty()) {
    sort_col = table.column(cfg.sort_by);
    if (sort_col < 0) fail(ErrorKind::MissingColumn, "sort column '" + cfg.sort_by + "' not found");
  }
  std::vector<bool> skip(table.header.size(), false);
  for (const auto& name : cfg.exclude_columns) {
    const int c = table.column(name);
    if (c < 0) fail(ErrorKind::MissingColumn, "excluded column '" + name + "' not found");
    skip[c] = true;
  }
  if (sort_col >= 0) skip[sort_col] = true;
  if (skip[ref]) fail(ErrorKind::InvalidArgument, "the reference column cannot be excluded");

  const std::size_t n = table.rows.size();
  if (n == 0) fail(ErrorKind::EmptySample, "count table has no rows");

  IngestResult out;
  out.pseudocount = cfg.pseudocount;
  std::vector<int> kept;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (skip[c]) continue;
    std::size_t present = 0;
    for (const auto& row : table.rows) {
      const double v = parse_number(row[c]);
      if (v < 0.0) fail(ErrorKind::InvalidArgument, "negative count in column '" + table.header[c] + "'");
      if (v > 0.0) ++present;
    }
    if (static_cast<int>(c) == ref) {
      if (present != n)
        fail(ErrorKind::ReferenceHasZeros, "reference column '" + cfg.reference_column + "' has zero counts");
      continue;
    }
    if (static_cast<double>(present) >= cfg.prevalence_threshold * static_cast<double>(n))
      kept.push_back(static_cast<int>(c));
    else
      out.dropped.push_back(table.header[c]);
  }
  if (kept.empty()) fail(ErrorKind::EmptyAfterFilter, "no count column besides the reference passes the filter");
  out.retained_with_reference = static_cast<int>(kept.size()) + 1;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> cov;
  if (sort_col >= 0) {
    cov.resize(n);
    for (std::size_t i = 0; i < n; ++i) cov[i] = parse_number(table.rows[i][sort_col]);
    std::stable_sort(order.begin(), order.end(),
                     [&cov](std::size_t a, std::size_t b) { return cov[a] < cov[b]; });
  }

  for (int c : kept) out.names.push_back(table.header[c]);
  out.z.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[order[i]];
    const double denom = parse_number(row[ref]) + cfg.pseudocount;
    for (std::size_t j = 0; j < kept.size(); ++j)
      out.z(i, j) = std::log((parse_number(row[kept[j]]) + cfg.pseudocount) / denom);
    if (sort_col >= 0) out.covariate.push_back(cov[order[i]]);
  }
  return out;
}

IngestResult ingest(const IngestConfig& cfg) {
  cfg.validate();
  return ingest_table(read_csv(cfg.input), cfg);
}

}  // namespace gcpd
