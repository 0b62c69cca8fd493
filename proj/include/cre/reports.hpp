#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "cre/dataset.hpp"
#include "cre/inference.hpp"
#include "cre/pipeline.hpp"
#include "cre/sensitivity.hpp"
#include "cre/simulation.hpp"

namespace cre {

// All artifacts serialize through these builders so that a stage rerun from
// intermediate files reproduces the pipeline's bytes exactly. Keys sort
// alphabetically; doubles print shortest round-trip.

nlohmann::json split_indices_json(const SplitIndices& s, int n);
SplitIndices split_indices_from_json(const nlohmann::json& j);

nlohmann::json discovery_config_json(const DiscoveryConfig& cfg, std::uint64_t seed);
nlohmann::json candidate_rules_json(const DiscoveryOutput& out, const std::vector<std::string>& column_names,
                                    const DiscoveryConfig& cfg, std::uint64_t seed);
nlohmann::json selection_report_json(const DiscoveryOutput& out, const std::vector<std::string>& column_names,
                                     const DiscoveryConfig& cfg, std::uint64_t seed);
// Rules marked selected in a selection report, or a bare {"rules":[...]} /
// [...] listing.
std::vector<Rule> rules_from_report_json(const nlohmann::json& j, const std::vector<std::string>& column_names);

nlohmann::json estimation_config_json(const EstimationConfig& cfg, std::uint64_t seed);
nlohmann::json inference_report_json(const EstimationOutput& out, const std::vector<std::string>& column_names,
                                     const EstimationConfig& cfg, std::uint64_t seed, int n_inference);
std::string inference_report_text(const InferenceReport& report);

nlohmann::json sensitivity_config_json(const SensitivityConfig& cfg);
nlohmann::json sensitivity_report_json(const SensitivityResult& result, const SensitivityConfig& cfg);
std::string sensitivity_report_text(const SensitivityResult& result);

nlohmann::json dgp_spec_json(const DgpSpec& spec);
nlohmann::json discovery_metrics_json(const DiscoveryMetrics& m, const DgpSpec& spec);
nlohmann::json estimation_metrics_json(const std::vector<EstimationMetrics>& ms, const DgpSpec& spec);

// Plot-ready long format: one line per (grid point, metric).
std::string metrics_csv(const std::vector<std::pair<std::string, DiscoveryMetrics>>& rows);
std::string estimation_metrics_csv(const std::vector<EstimationMetrics>& ms);

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace cre
