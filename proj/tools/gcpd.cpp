// Command-line front end: simulate, estimate, infer, bench and ingest.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gcpd/bench.hpp"
#include "gcpd/changepoint.hpp"
#include "gcpd/csv.hpp"
#include "gcpd/error.hpp"
#include "gcpd/inference.hpp"
#include "gcpd/ingest.hpp"
#include "gcpd/quantiles.hpp"
#include "gcpd/serialize.hpp"
#include "gcpd/simulate.hpp"

using namespace gcpd;

namespace {

/// JSON config files: top-level keys set global options, nested objects
/// named after a subcommand set that subcommand's options.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    collect(j, "", {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config values must be scalars or arrays of scalars");
  }

  static void collect(const nlohmann::json& j, const std::string& name,
                      std::vector<std::string> parents, std::vector<CLI::ConfigItem>& out) {
    if (j.is_object()) {
      if (!name.empty()) parents.push_back(name);
      for (auto it = j.begin(); it != j.end(); ++it) collect(*it, it.key(), parents, out);
      return;
    }
    if (name.empty()) throw CLI::ConversionError("config root must be a JSON object");
    CLI::ConfigItem item;
    item.parents = std::move(parents);
    item.name = name;
    if (j.is_array())
      for (const auto& v : j) item.inputs.push_back(scalar(v));
    else
      item.inputs.push_back(scalar(j));
    out.push_back(std::move(item));
  }
};

/// Seed precedence: --seed, then the value carried by an input document, then
/// GCPD_SEED, then 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                           const std::optional<std::uint64_t>& document = std::nullopt) {
  if (flag) return *flag;
  if (document) return *document;
  if (const char* env = std::getenv("GCPD_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::InvalidArgument, "GCPD_SEED must be an unsigned integer");
  }
  return 0;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text << std::flush;
  else
    write_text_file(path, text);
}

void center_columns(Matrix& z) { z.rowwise() -= z.colwise().mean(); }

struct ScenarioArgs {
  std::string file;
  std::optional<int> T;
  std::optional<int> p;
  std::optional<double> tau0;

  void add(CLI::App* cmd) {
    cmd->add_option("--scenario", file, "ScenarioConfig JSON file")->check(CLI::ExistingFile);
    cmd->add_option("--T", T, "Sample count (standard design)");
    cmd->add_option("--p", p, "Dimension (standard design)");
    cmd->add_option("--tau0", tau0, "True change fraction (standard design)");
  }

  ScenarioConfig resolve(const std::optional<std::uint64_t>& seed_flag) const {
    ScenarioConfig cfg;
    std::optional<std::uint64_t> doc_seed;
    if (!file.empty()) {
      const Json j = read_json_file(file);
      cfg = scenario_from_json(j);
      if (j.contains("seed")) doc_seed = cfg.seed;
      if (T || p || tau0) {
        cfg = standard_scenario(T.value_or(cfg.T), p.value_or(cfg.p), tau0.value_or(cfg.tau0), 0);
      }
    } else {
      if (!T || !p || !tau0)
        fail(ErrorKind::InvalidArgument, "give --scenario or all of --T, --p and --tau0");
      cfg = standard_scenario(*T, *p, *tau0, 0);
    }
    cfg.seed = resolve_seed(seed_flag, doc_seed);
    cfg.validate();
    return cfg;
  }
};

struct VanishingArgs {
  int paths = VanishingMcConfig{}.n_paths;
  double step = VanishingMcConfig{}.step;
  double horizon = VanishingMcConfig{}.horizon;
  bool fixed_horizon = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--mc-paths", paths, "Vanishing-regime Monte Carlo paths")->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--mc-step", step, "Vanishing-regime grid step")->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--horizon", horizon, "Vanishing-regime path horizon")->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--fixed-horizon", fixed_horizon, "Fail instead of enlarging a horizon that is too small");
  }

  VanishingMcConfig config(std::uint64_t seed) const {
    VanishingMcConfig cfg;
    cfg.n_paths = paths;
    cfg.step = step;
    cfg.horizon = horizon;
    cfg.seed = seed;
    cfg.adaptive = !fixed_horizon;
    return cfg;
  }
};

struct NonVanishingArgs {
  int paths = NonVanishingMcConfig{}.n_paths;
  int horizon = NonVanishingMcConfig{}.horizon;

  void add(CLI::App* cmd) {
    cmd->add_option("--nv-paths", paths, "Non-vanishing-regime random walks")->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--nv-horizon", horizon, "Non-vanishing-regime walk length per side")
        ->capture_default_str()->check(CLI::PositiveNumber);
  }

  NonVanishingMcConfig config(std::uint64_t seed, bool fixed_horizon) const {
    NonVanishingMcConfig cfg;
    cfg.n_paths = paths;
    cfg.horizon = horizon;
    cfg.seed = seed;
    cfg.adaptive = !fixed_horizon;
    return cfg;
  }
};


std::vector<std::string> default_names(int p) {
  std::vector<std::string> names;
  for (int j = 1; j <= p; ++j) names.push_back("z" + std::to_string(j));
  return names;
}

int run_simulate(const ScenarioArgs& scenario, const std::optional<std::uint64_t>& seed,
                 const std::string& output) {
  const ScenarioConfig cfg = scenario.resolve(seed);
  const Matrix z = generate_series(cfg);
  std::ostringstream out;
  write_matrix_csv(out, default_names(cfg.p), z);
  emit(output, out.str());
  return 0;
}

struct EstimateArgs {
  std::string data;
  std::string output;
  std::vector<double> grid = default_init_grid();
  int lambda_grid_size = 75;
  double tol = LassoConfig{}.tol;
  int max_iter = LassoConfig{}.max_iter;
  std::optional<int> external_k;
  std::optional<std::uint64_t> seed;
  bool center = false;
};

LassoConfig lasso_config(int grid_size, double tol, int max_iter) {
  LassoConfig cfg;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  cfg.lambda_grid = default_lambda_grid(grid_size);
  cfg.validate();
  return cfg;
}

Matrix load_data(const std::string& path, bool center) {
  Matrix z = read_matrix_csv(path).values;
  if (center) center_columns(z);
  return z;
}

int run_estimate(const EstimateArgs& a) {
  const Matrix z = load_data(a.data, a.center);
  const LassoConfig cfg = lasso_config(a.lambda_grid_size, a.tol, a.max_iter);
  const ChangePointFit fit =
      a.external_k ? algorithm2(z, *a.external_k, cfg) : algorithm1(z, a.grid, cfg);
  emit(a.output, dump(to_json(fit)));
  return 0;
}

enum class RegimeChoice { Vanishing, NonVanishing, Both };

struct InferArgs {
  std::string data;
  std::string fit;
  std::string output;
  std::vector<double> alphas{0.05};
  std::string regime = "both";
  int df_grid_max = 100;
  std::optional<std::uint64_t> seed;
  bool center = false;
  VanishingArgs vanishing;
  NonVanishingArgs nonvanishing;
};

int run_infer(const InferArgs& a) {
  RegimeChoice choice;
  if (a.regime == "vanishing")
    choice = RegimeChoice::Vanishing;
  else if (a.regime == "nonvanishing")
    choice = RegimeChoice::NonVanishing;
  else if (a.regime == "both")
    choice = RegimeChoice::Both;
  else
    fail(ErrorKind::InvalidArgument, "--regime must be vanishing, nonvanishing or both");
  for (double alpha : a.alphas) require(alpha > 0.0 && alpha < 1.0, "--alpha must lie in (0,1)");

  const Matrix z = load_data(a.data, a.center);
  const ChangePointFit fit = change_point_fit_from_json(read_json_file(a.fit));
  if (fit.T != z.rows())
    fail(ErrorKind::DimensionMismatch, "the fit was computed on data with a different row count");

  const RegimeParams params = estimate_regime_params(z, fit, {a.df_grid_max});
  const Rng master(resolve_seed(a.seed), 0);
  const VanishingMcConfig vcfg = a.vanishing.config(master.child(0)());
  const NonVanishingMcConfig ncfg = a.nonvanishing.config(master.child(1)(), a.vanishing.fixed_horizon);

  Json quantiles = Json::array();
  Json intervals = Json::array();
  Json mc;
  if (choice != RegimeChoice::Vanishing) {
    const std::vector<int> q = nonvanishing_quantiles(params, a.alphas, ncfg);
    for (std::size_t i = 0; i < a.alphas.size(); ++i) {
      quantiles.push_back({{"regime", to_string(Regime::NonVanishing)}, {"alpha", a.alphas[i]}, {"quantile", q[i]}});
      intervals.push_back(to_json(confidence_interval(fit, params, Regime::NonVanishing, a.alphas[i], q[i])));
    }
    mc["nonvanishing"] = {{"n_paths", ncfg.n_paths}, {"horizon", ncfg.horizon}, {"seed", ncfg.seed}};
  }
  if (choice != RegimeChoice::NonVanishing) {
    const VanishingRatios ratios = vanishing_ratios(params.sigma1_star_sq, params.sigma2_star_sq,
                                                    params.sigma1_sq, params.sigma2_sq);
    const VanishingArgmaxSampler sampler(vcfg);
    const std::vector<double> q = sampler.quantiles(a.alphas, ratios);
    for (std::size_t i = 0; i < a.alphas.size(); ++i) {
      quantiles.push_back({{"regime", to_string(Regime::Vanishing)}, {"alpha", a.alphas[i]}, {"quantile", q[i]}});
      intervals.push_back(to_json(confidence_interval(fit, params, Regime::Vanishing, a.alphas[i], q[i])));
    }
    mc["vanishing"] = {{"n_paths", vcfg.n_paths}, {"step", vcfg.step}, {"horizon", sampler.horizon()},
                       {"seed", vcfg.seed}};
  }

  Json out;
  out["regime_params"] = to_json(params);
  out["intervals"] = std::move(intervals);
  out["quantiles"] = std::move(quantiles);
  out["monte_carlo"] = std::move(mc);
  emit(a.output, dump(out));
  return 0;
}

struct BenchArgs {
  ScenarioArgs scenario;
  int replications = 200;
  std::vector<double> alphas{0.1, 0.05, 0.01};
  std::string format = "csv";
  std::string output;
  std::optional<std::uint64_t> seed;
  int lambda_grid_size = 75;
  double tol = LassoConfig{}.tol;
  int df_grid_max = 100;
  VanishingArgs vanishing;
  NonVanishingArgs nonvanishing;
};

int run_bench(const BenchArgs& a) {
  const ScenarioConfig scenario = a.scenario.resolve(a.seed);
  const TableFormat format = table_format_from_string(a.format);
  BenchOptions options;
  options.lasso = lasso_config(a.lambda_grid_size, a.tol, LassoConfig{}.max_iter);
  options.inference.df_grid_max = a.df_grid_max;
  options.vanishing = a.vanishing.config(0);
  options.nonvanishing = a.nonvanishing.config(0, a.vanishing.fixed_horizon);
  const BenchmarkReport report =
      run_replications(scenario, a.replications, a.alphas, Rng(scenario.seed, 0), options);
  emit(a.output, emit_table(std::span(&report, 1), format));
  return 0;
}

struct IngestArgs {
  IngestConfig cfg;
  std::string output;
};

int run_ingest(const IngestArgs& a) {
  const IngestResult result = ingest(a.cfg);
  std::ostringstream out;
  write_matrix_csv(out, result.names, result.z);
  emit(a.output, out.str());

  Json meta;
  meta["input"] = a.cfg.input;
  meta["reference_column"] = a.cfg.reference_column;
  meta["prevalence_threshold"] = a.cfg.prevalence_threshold;
  meta["pseudocount"] = result.pseudocount;
  meta["rows"] = result.z.rows();
  meta["retained_with_reference"] = result.retained_with_reference;
  meta["columns"] = result.names;
  meta["dropped"] = result.dropped;
  meta["sort_by"] = a.cfg.sort_by;
  meta["covariate"] = result.covariate;
  meta["recommend_center"] = true;
  if (!a.output.empty() && a.output != "-") write_text_file(a.output + ".meta.json", dump(meta));
  else std::cerr << dump(meta);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Change-point estimation and inference for dynamic Gaussian graphical models"};
  app.name("gcpd");
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON configuration file (flags override its values)");
  app.allow_config_extras(CLI::config_extras_mode::ignore);

  ScenarioArgs sim_scenario;
  std::optional<std::uint64_t> sim_seed;
  std::string sim_output;
  auto* sim = app.add_subcommand("simulate", "Simulate a data set from a scenario (CSV out)");
  sim_scenario.add(sim);
  sim->add_option("--seed", sim_seed, "Random seed (default: scenario seed, then GCPD_SEED)");
  sim->add_option("-o,--output", sim_output, "Output CSV path (default stdout)");

  EstimateArgs est;
  auto* estc = app.add_subcommand("estimate", "Estimate the change point (fit JSON out)");
  estc->add_option("--data", est.data, "Data CSV")->required()->check(CLI::ExistingFile);
  estc->add_option("-o,--output", est.output, "Output JSON path (default stdout)");
  estc->add_option("--grid", est.grid, "Initializer grid of split fractions")->capture_default_str();
  estc->add_option("--lambda-grid-size", est.lambda_grid_size, "Number of lambda grid points")
      ->capture_default_str()->check(CLI::PositiveNumber);
  estc->add_option("--tol", est.tol, "Coordinate descent tolerance")->capture_default_str()
      ->check(CLI::PositiveNumber);
  estc->add_option("--max-iter", est.max_iter, "Coordinate descent sweep limit")->capture_default_str()
      ->check(CLI::PositiveNumber);
  estc->add_option("--external-k", est.external_k, "Seed Step 2 with this split index (Algorithm 2)");
  estc->add_option("--seed", est.seed, "Accepted for uniformity; estimation is deterministic");
  estc->add_flag("--center", est.center, "Mean-center every column first");

  InferArgs inf;
  auto* infc = app.add_subcommand("infer", "Regime parameters and confidence intervals (JSON out)");
  infc->add_option("--data", inf.data, "Data CSV")->required()->check(CLI::ExistingFile);
  infc->add_option("--fit", inf.fit, "Fit JSON from `estimate`")->required()->check(CLI::ExistingFile);
  infc->add_option("-o,--output", inf.output, "Output JSON path (default stdout)");
  infc->add_option("--alpha", inf.alphas, "Significance level (repeatable)")->capture_default_str();
  infc->add_option("--regime", inf.regime, "vanishing, nonvanishing or both")->capture_default_str()
      ->check(CLI::IsMember({"vanishing", "nonvanishing", "both"}));
  infc->add_option("--df-grid-max", inf.df_grid_max, "Largest chi-square df tried")->capture_default_str()
      ->check(CLI::PositiveNumber);
  infc->add_option("--seed", inf.seed, "Monte Carlo seed (default GCPD_SEED, then 0)");
  infc->add_flag("--center", inf.center, "Mean-center every column first");
  inf.vanishing.add(infc);
  inf.nonvanishing.add(infc);

  BenchArgs bench;
  auto* benc = app.add_subcommand("bench", "Replicate a scenario and report bias, rmse and coverage");
  bench.scenario.add(benc);
  benc->add_option("--replications", bench.replications, "Replicates")->capture_default_str()
      ->check(CLI::PositiveNumber);
  benc->add_option("--alphas", bench.alphas, "Significance levels")->capture_default_str();
  benc->add_option("--format", bench.format, "csv, markdown or json")->capture_default_str()
      ->check(CLI::IsMember({"csv", "markdown", "json"}));
  benc->add_option("-o,--output", bench.output, "Output path (default stdout)");
  benc->add_option("--seed", bench.seed, "Master seed (default: scenario seed, then GCPD_SEED)");
  benc->add_option("--lambda-grid-size", bench.lambda_grid_size, "Number of lambda grid points")
      ->capture_default_str()->check(CLI::PositiveNumber);
  benc->add_option("--tol", bench.tol, "Coordinate descent tolerance")->capture_default_str()
      ->check(CLI::PositiveNumber);
  benc->add_option("--df-grid-max", bench.df_grid_max, "Largest chi-square df tried")->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench.vanishing.add(benc);
  bench.nonvanishing.add(benc);

  IngestArgs ing;
  auto* ingc = app.add_subcommand("ingest", "Prevalence filter and log-ratio transform of a count table");
  ingc->add_option("--input", ing.cfg.input, "Count table CSV")->required()->check(CLI::ExistingFile);
  ingc->add_option("--reference", ing.cfg.reference_column, "Reference count column")->required();
  ingc->add_option("--threshold", ing.cfg.prevalence_threshold, "Minimum prevalence")->capture_default_str();
  ingc->add_option("--sort-by", ing.cfg.sort_by, "Covariate column used to order samples");
  ingc->add_option("--pseudocount", ing.cfg.pseudocount, "Added to every count")->capture_default_str();
  ingc->add_option("--exclude", ing.cfg.exclude_columns, "Metadata columns to ignore");
  ingc->add_option("-o,--output", ing.output, "Output CSV path (metadata goes to <output>.meta.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sim) return run_simulate(sim_scenario, sim_seed, sim_output);
    if (*estc) return run_estimate(est);
    if (*infc) return run_infer(inf);
    if (*benc) return run_bench(bench);
    if (*ingc) return run_ingest(ing);
  } catch (const Error& e) {
    std::cerr << "gcpd: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return is_numerical(e.kind()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "gcpd: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
