#include "gcpd/bench.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "gcpd/csv.hpp"
#include "gcpd/error.hpp"
#include "gcpd/serialize.hpp"

namespace gcpd {
namespace {

constexpr std::uint64_t kSamplerChild = std::numeric_limits<std::uint64_t>::max();

struct ReplicateOutcome {
  std::optional<int> estimate;
  std::string failure;
  std::vector<ConfidenceInterval> intervals;  // cell order
};

const Regime kRegimeOrder[] = {Regime::NonVanishing, Regime::Vanishing};

ReplicateOutcome run_one(const ScenarioConfig& base, std::span<const double> alphas,
                         const Rng& stream, const VanishingArgmaxSampler& sampler,
                         const BenchOptions& options) {
  ReplicateOutcome out;
  try {
    ScenarioConfig scenario = base;
    Rng seeds = stream;
    scenario.seed = seeds();
    const Matrix z = generate_series(scenario);
    const ChangePointFit fit = algorithm1(z, options.init_grid, options.lasso);
    out.estimate = fit.k_final;

    const RegimeParams params = estimate_regime_params(z, fit, options.inference);
    NonVanishingMcConfig nv = options.nonvanishing;
    nv.seed = seeds();
    const std::vector<int> q_nv = nonvanishing_quantiles(params, alphas, nv);
    const VanishingRatios ratios = vanishing_ratios(params.sigma1_star_sq, params.sigma2_star_sq,
                                                    params.sigma1_sq, params.sigma2_sq);
    const std::vector<double> q_v = sampler.quantiles(alphas, ratios);
    for (Regime regime : kRegimeOrder)
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        const double q = regime == Regime::Vanishing ? q_v[a] : static_cast<double>(q_nv[a]);
        out.intervals.push_back(confidence_interval(fit, params, regime, alphas[a], q));
      }
  } catch (const Error& e) {
    out.failure = to_string(e.kind());
    out.intervals.clear();
  }
  return out;
}

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  // Avoid "-0.000" style output for values that round to zero.
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string regime_tag(Regime regime) {
  return regime == Regime::Vanishing ? "vanishing" : "nonvanishing";
}

std::string alpha_tag(double alpha) { return format_number(alpha); }

}  // namespace

int BenchmarkReport::failed() const {
  int total = 0;
  for (const auto& [reason, count] : failures) total += count;
  return total;
}

const CoverageCell* BenchmarkReport::cell(Regime regime, double alpha) const {
  for (const auto& c : cells)
    if (c.regime == regime && std::abs(c.alpha - alpha) < 1e-12) return &c;
  return nullptr;
}

BenchmarkReport run_replications(const ScenarioConfig& scenario, int replications,
                                 std::span<const double> alphas, const Rng& master,
                                 const BenchOptions& options) {
  require(replications >= 1, "need at least one replication");
  require(!alphas.empty(), "need at least one alpha");
  for (double a : alphas) require(a > 0.0 && a < 1.0, "alpha must lie in (0,1)");
  scenario.validate();
  options.lasso.validate();

  VanishingMcConfig vcfg = options.vanishing;
  vcfg.seed = master.child(kSamplerChild)();
  const VanishingArgmaxSampler sampler(vcfg);

  std::vector<ReplicateOutcome> outcomes(replications);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < replications; ++r)
    outcomes[r] = run_one(scenario, alphas, master.child(static_cast<std::uint64_t>(r)), sampler,
                          options);

  BenchmarkReport report;
  report.scenario = scenario;
  report.replications = replications;
  for (Regime regime : kRegimeOrder)
    for (double alpha : alphas) report.cells.push_back({regime, alpha, 0.0, 0.0, 0});

  const int k0 = scenario.change_index();
  double sum_err = 0.0, sum_sq = 0.0;
  int estimated = 0;
  for (const auto& o : outcomes) {
    report.estimates.push_back(o.estimate.value_or(-1));
    if (o.estimate) {
      const double err = *o.estimate - k0;
      sum_err += err;
      sum_sq += err * err;
      ++estimated;
    }
    if (!o.failure.empty()) {
      ++report.failures[o.failure];
      continue;
    }
    for (std::size_t c = 0; c < o.intervals.size(); ++c) {
      auto& cell = report.cells[c];
      cell.coverage += o.intervals[c].contains(k0) ? 1.0 : 0.0;
      cell.avg_margin += o.intervals[c].margin;
      ++cell.evaluated;
    }
  }
  if (estimated > 0) {
    report.bias = std::abs(sum_err / estimated);
    report.rmse = std::sqrt(sum_sq / estimated);
  }
  for (auto& cell : report.cells)
    if (cell.evaluated > 0) {
      cell.coverage /= cell.evaluated;
      cell.avg_margin /= cell.evaluated;
    }
  return report;
}

TableFormat table_format_from_string(const std::string& name) {
  if (name == "csv") return TableFormat::Csv;
  if (name == "markdown" || name == "md") return TableFormat::Markdown;
  if (name == "json") return TableFormat::Json;
  fail(ErrorKind::InvalidArgument, "unknown table format '" + name + "'");
}

std::string emit_table(std::span<const BenchmarkReport> reports, TableFormat format) {
  require(!reports.empty(), "emit_table: no reports");
  const auto& layout = reports.front().cells;
  for (const auto& r : reports) {
    bool same = r.cells.size() == layout.size();
    for (std::size_t c = 0; same && c < layout.size(); ++c)
      same = r.cells[c].regime == layout[c].regime && r.cells[c].alpha == layout[c].alpha;
    require(same, "emit_table: reports use different (regime, alpha) cells");
  }

  std::ostringstream out;
  switch (format) {
    case TableFormat::Csv: {
      out << "T,p,bias,rmse";
      for (const auto& c : layout)
        out << ",coverage_" << regime_tag(c.regime) << "_" << alpha_tag(c.alpha) << ",me_"
            << regime_tag(c.regime) << "_" << alpha_tag(c.alpha);
      out << ",tau0,replications,failures\n";
      for (const auto& r : reports) {
        out << r.scenario.T << ',' << r.scenario.p << ',' << fixed(r.bias, 3) << ','
            << fixed(r.rmse, 3);
        for (const auto& c : r.cells) out << ',' << fixed(c.coverage, 2) << ',' << fixed(c.avg_margin, 3);
        out << ',' << format_number(r.scenario.tau0) << ',' << r.replications << ',' << r.failed()
            << '\n';
      }
      break;
    }
    case TableFormat::Markdown: {
      out << "| T | p | bias (rmse)";
      for (const auto& c : layout)
        out << " | " << (c.regime == Regime::Vanishing ? "V" : "NV") << " α=" << alpha_tag(c.alpha)
            << " coverage (avg ME)";
      out << " |\n|---|---|---";
      for (std::size_t c = 0; c < layout.size(); ++c) out << "|---";
      out << "|\n";
      for (const auto& r : reports) {
        out << "| " << r.scenario.T << " | " << r.scenario.p << " | " << fixed(r.bias, 3) << " ("
            << fixed(r.rmse, 3) << ")";
        for (const auto& c : r.cells)
          out << " | " << fixed(c.coverage, 2) << " (" << fixed(c.avg_margin, 3) << ")";
        out << " |\n";
      }
      break;
    }
    case TableFormat::Json: {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : reports) arr.push_back(to_json(r));
      out << arr.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

std::vector<BenchmarkReport> parse_table_csv(const std::string& text) {
  std::istringstream in(text);
  const CsvTable table = parse_csv(in);
  const auto need = [&table](const std::string& name) {
    const int c = table.column(name);
    if (c < 0) fail(ErrorKind::MissingColumn, "bench table lacks column '" + name + "'");
    return c;
  };
  const int c_T = need("T"), c_p = need("p"), c_bias = need("bias"), c_rmse = need("rmse");
  const int c_tau = need("tau0"), c_reps = need("replications"), c_fail = need("failures");

  struct CellColumns {
    Regime regime;
    double alpha;
    int coverage;
    int me;
  };
  std::vector<CellColumns> cells;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string& h = table.header[c];
    const std::string prefix = "coverage_";
    if (h.rfind(prefix, 0) != 0) continue;
    const std::string rest = h.substr(prefix.size());
    const auto sep = rest.find('_');
    if (sep == std::string::npos) fail(ErrorKind::InvalidArgument, "bad column '" + h + "'");
    const Regime regime = regime_from_string(rest.substr(0, sep));
    const double alpha = parse_number(rest.substr(sep + 1));
    cells.push_back({regime, alpha, static_cast<int>(c), need("me_" + rest)});
  }

  std::vector<BenchmarkReport> reports;
  for (const auto& row : table.rows) {
    BenchmarkReport r;
    r.scenario = standard_scenario(static_cast<int>(parse_number(row[c_T])),
                                   static_cast<int>(parse_number(row[c_p])),
                                   parse_number(row[c_tau]), 0);
    r.replications = static_cast<int>(parse_number(row[c_reps]));
    r.bias = parse_number(row[c_bias]);
    r.rmse = parse_number(row[c_rmse]);
    const int failed = static_cast<int>(parse_number(row[c_fail]));
    if (failed > 0) r.failures["unspecified"] = failed;
    for (const auto& c : cells)
      r.cells.push_back({c.regime, c.alpha, parse_number(row[c.coverage]), parse_number(row[c.me]),
                         r.replications - failed});
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace gcpd
