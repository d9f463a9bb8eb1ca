#pragma once

// JSON documents for the library's reports. Field order is fixed (ordered_json),
// and doubles are written in the shortest form that reads back to the same
// value, so identical results always produce identical bytes.

#include <string>

#include "json.hpp"

#include "gcpd/bench.hpp"
#include "gcpd/changepoint.hpp"
#include "gcpd/inference.hpp"
#include "gcpd/simulate.hpp"

namespace gcpd {

using Json = nlohmann::ordered_json;

Json to_json(const CovarianceSpec& spec);
Json to_json(const ScenarioConfig& cfg);
Json to_json(const EdgeEstimates& e);
Json to_json(const NeighborhoodFit& fit);
Json to_json(const ChangePointFit& fit);
Json to_json(const RegimeParams& params);
Json to_json(const ConfidenceInterval& ci);
Json to_json(const BenchmarkReport& report);

CovarianceSpec covariance_spec_from_json(const Json& j);
/// Missing sigma_spec / delta_spec fall back to the standard design for (T, p).
ScenarioConfig scenario_from_json(const Json& j);
EdgeEstimates edge_estimates_from_json(const Json& j);
NeighborhoodFit neighborhood_fit_from_json(const Json& j);
ChangePointFit change_point_fit_from_json(const Json& j);
RegimeParams regime_params_from_json(const Json& j);
ConfidenceInterval confidence_interval_from_json(const Json& j);

/// Two-space indented document with a trailing newline.
std::string dump(const Json& j);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gcpd
