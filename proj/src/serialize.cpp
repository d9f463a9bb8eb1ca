#include "gcpd/serialize.hpp"

#include <fstream>
#include <sstream>

#include "gcpd/error.hpp"

namespace gcpd {
namespace {

template <typename T>
T field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name))
    fail(ErrorKind::InvalidArgument, std::string("JSON document lacks field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("JSON field '") + name + "': " + e.what());
  }
}

Json vector_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vector vector_from_json(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

Json to_json(const CovarianceSpec& spec) {
  Json j;
  j["p"] = spec.p;
  j["s"] = spec.s;
  j["rho"] = spec.rho;
  j["kind"] = to_string(spec.kind);
  return j;
}

Json to_json(const ScenarioConfig& cfg) {
  Json j;
  j["T"] = cfg.T;
  j["p"] = cfg.p;
  j["tau0"] = cfg.tau0;
  j["sigma_spec"] = to_json(cfg.sigma_spec);
  j["delta_spec"] = to_json(cfg.delta_spec);
  j["seed"] = cfg.seed;
  return j;
}

Json to_json(const EdgeEstimates& e) {
  Json j;
  Json coefficients = Json::array();
  for (const auto& v : e.coefficients) coefficients.push_back(vector_json(v));
  j["coefficients"] = std::move(coefficients);
  j["supports"] = e.supports;
  j["tau_used"] = e.tau_used;
  j["lambda_used"] = e.lambda_used;
  return j;
}

Json to_json(const NeighborhoodFit& fit) {
  Json j;
  j["mu"] = to_json(fit.mu);
  j["gamma"] = to_json(fit.gamma);
  j["unconverged"] = fit.unconverged;
  return j;
}

Json to_json(const ChangePointFit& fit) {
  Json j;
  j["T"] = fit.T;
  j["tau_init"] = fit.tau_init;
  j["tau_step1"] = fit.tau_step1;
  j["tau_final"] = fit.tau_final;
  j["k_init"] = fit.k_init;
  j["k_step1"] = fit.k_step1;
  j["k_final"] = fit.k_final;
  j["lambda_step1"] = fit.lambda_step1;
  j["lambda_step2"] = fit.lambda_step2;
  j["degenerate_split"] = fit.degenerate_split;
  j["low_signal"] = fit.low_signal;
  j["edges_step1"] = to_json(fit.edges_step1);
  j["edges_step2"] = to_json(fit.edges_step2);
  j["q_profile"] = fit.q_profile;
  return j;
}

Json to_json(const RegimeParams& params) {
  Json j;
  j["xi22"] = params.xi22;
  j["psi"] = params.psi;
  j["sigma1_sq"] = params.sigma1_sq;
  j["sigma2_sq"] = params.sigma2_sq;
  j["sigma1_star_sq"] = params.sigma1_star_sq;
  j["sigma2_star_sq"] = params.sigma2_star_sq;
  j["bar_sigma1_sq"] = params.bar_sigma1_sq;
  j["bar_sigma2_sq"] = params.bar_sigma2_sq;
  j["df"] = params.df;
  j["ks_pvalue"] = params.ks_pvalue;
  return j;
}

Json to_json(const ConfidenceInterval& ci) {
  Json j;
  j["regime"] = to_string(ci.regime);
  j["alpha"] = ci.alpha;
  j["center_index"] = ci.center_index;
  j["margin"] = ci.margin;
  j["lo"] = ci.lo;
  j["hi"] = ci.hi;
  return j;
}

Json to_json(const BenchmarkReport& report) {
  Json j;
  j["scenario"] = to_json(report.scenario);
  j["replications"] = report.replications;
  j["bias"] = report.bias;
  j["rmse"] = report.rmse;
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    Json cell;
    cell["regime"] = to_string(c.regime);
    cell["alpha"] = c.alpha;
    cell["coverage"] = c.coverage;
    cell["avg_margin"] = c.avg_margin;
    cell["evaluated"] = c.evaluated;
    cells.push_back(std::move(cell));
  }
  j["coverage"] = std::move(cells);
  Json failures = Json::object();
  for (const auto& [reason, count] : report.failures) failures[reason] = count;
  j["failures"] = std::move(failures);
  j["estimates"] = report.estimates;
  return j;
}

CovarianceSpec covariance_spec_from_json(const Json& j) {
  CovarianceSpec spec;
  spec.p = field<int>(j, "p");
  spec.s = field<int>(j, "s");
  spec.rho = field<double>(j, "rho");
  spec.kind = covariance_kind_from_string(field<std::string>(j, "kind"));
  return spec;
}

ScenarioConfig scenario_from_json(const Json& j) {
  const int T = field<int>(j, "T");
  const int p = field<int>(j, "p");
  const double tau0 = field<double>(j, "tau0");
  const auto seed = j.contains("seed") ? field<std::uint64_t>(j, "seed") : std::uint64_t{0};
  ScenarioConfig cfg = standard_scenario(T, p, tau0, seed);
  if (j.contains("sigma_spec")) cfg.sigma_spec = covariance_spec_from_json(j.at("sigma_spec"));
  if (j.contains("delta_spec")) cfg.delta_spec = covariance_spec_from_json(j.at("delta_spec"));
  cfg.validate();
  return cfg;
}

EdgeEstimates edge_estimates_from_json(const Json& j) {
  EdgeEstimates e;
  for (const auto& v : field<Json>(j, "coefficients")) e.coefficients.push_back(vector_from_json(v));
  const int p = e.dimension();
  for (int i = 0; i < p; ++i)
    if (e.coefficients[i].size() != p - 1)
      fail(ErrorKind::DimensionMismatch, "edge estimates: coefficient vector has the wrong length");
  e.tau_used = field<double>(j, "tau_used");
  e.lambda_used = field<double>(j, "lambda_used");
  e.refresh_supports();
  return e;
}

NeighborhoodFit neighborhood_fit_from_json(const Json& j) {
  NeighborhoodFit fit;
  fit.mu = edge_estimates_from_json(field<Json>(j, "mu"));
  fit.gamma = edge_estimates_from_json(field<Json>(j, "gamma"));
  fit.unconverged = j.contains("unconverged") ? field<int>(j, "unconverged") : 0;
  return fit;
}

ChangePointFit change_point_fit_from_json(const Json& j) {
  ChangePointFit fit;
  fit.T = field<int>(j, "T");
  fit.tau_init = field<double>(j, "tau_init");
  fit.tau_step1 = field<double>(j, "tau_step1");
  fit.tau_final = field<double>(j, "tau_final");
  fit.k_init = field<int>(j, "k_init");
  fit.k_step1 = field<int>(j, "k_step1");
  fit.k_final = field<int>(j, "k_final");
  fit.lambda_step1 = field<double>(j, "lambda_step1");
  fit.lambda_step2 = field<double>(j, "lambda_step2");
  fit.degenerate_split = j.value("degenerate_split", false);
  fit.low_signal = j.value("low_signal", false);
  fit.edges_step1 = neighborhood_fit_from_json(field<Json>(j, "edges_step1"));
  fit.edges_step2 = neighborhood_fit_from_json(field<Json>(j, "edges_step2"));
  fit.q_profile = field<std::vector<double>>(j, "q_profile");
  return fit;
}

RegimeParams regime_params_from_json(const Json& j) {
  RegimeParams p;
  p.xi22 = field<double>(j, "xi22");
  p.psi = field<double>(j, "psi");
  p.sigma1_sq = field<double>(j, "sigma1_sq");
  p.sigma2_sq = field<double>(j, "sigma2_sq");
  p.sigma1_star_sq = field<double>(j, "sigma1_star_sq");
  p.sigma2_star_sq = field<double>(j, "sigma2_star_sq");
  p.bar_sigma1_sq = field<double>(j, "bar_sigma1_sq");
  p.bar_sigma2_sq = field<double>(j, "bar_sigma2_sq");
  p.df = field<int>(j, "df");
  p.ks_pvalue = field<double>(j, "ks_pvalue");
  return p;
}

ConfidenceInterval confidence_interval_from_json(const Json& j) {
  ConfidenceInterval ci;
  ci.regime = regime_from_string(field<std::string>(j, "regime"));
  ci.alpha = field<double>(j, "alpha");
  ci.center_index = field<int>(j, "center_index");
  ci.margin = field<double>(j, "margin");
  ci.lo = field<double>(j, "lo");
  ci.hi = field<double>(j, "hi");
  return ci;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::InvalidArgument, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

}  // namespace gcpd
