#include "cre/reports.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cre/errors.hpp"

namespace cre {
namespace {

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

nlohmann::json lasso_params_json(const LassoParams& p) {
  return {{"n_lambda", p.n_lambda},
          {"lambda_min_ratio", p.lambda_min_ratio},
          {"tol", p.tol},
          {"max_sweeps", p.max_sweeps}};
}

nlohmann::json ensemble_params_json(const EnsembleParams& p) {
  return {{"n_trees_forest", p.n_trees_forest},
          {"n_trees_boost", p.n_trees_boost},
          {"max_depth", p.max_depth},
          {"min_leaf", p.min_leaf},
          {"learning_rate", p.learning_rate},
          {"subsample_fraction", p.subsample_fraction},
          {"feature_fraction_forest", p.feature_fraction_forest},
          {"bootstrap_forest", p.bootstrap_forest}};
}

}  // namespace

nlohmann::json dgp_spec_json(const DgpSpec& spec) {
  return {{"n", spec.n},
          {"k_effect", spec.k_effect},
          {"n_rules", spec.n_rules},
          {"effect_modifiers", spec.effect_modifiers == Modifiers::X123 ? "x1_x2_x3" : "x8_x9_x10"},
          {"correlation", spec.correlation},
          {"confounding", spec.confounding == Confounding::Linear ? "linear" : "nonlinear"},
          {"seed", spec.seed}};
}

nlohmann::json split_indices_json(const SplitIndices& s, int n) {
  return {{"discovery", s.discovery}, {"inference", s.inference}, {"ratio", s.ratio}, {"seed", s.seed}, {"n", n}};
}

SplitIndices split_indices_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("discovery") || !j.contains("inference")) {
    throw schema_error("split JSON needs 'discovery' and 'inference' index arrays");
  }
  SplitIndices s;
  s.discovery = j["discovery"].get<std::vector<int>>();
  s.inference = j["inference"].get<std::vector<int>>();
  s.ratio = j.value("ratio", 0.0);
  s.seed = j.value("seed", std::uint64_t{0});
  return s;
}

nlohmann::json discovery_config_json(const DiscoveryConfig& cfg, std::uint64_t seed) {
  return {{"method", pseudo_method_name(cfg.method)},
          {"ensemble", ensemble_params_json(cfg.ensemble)},
          {"stability",
           {{"threshold", cfg.stability.threshold},
            {"q_max", cfg.stability.q_max},
            {"n_subsamples", cfg.stability.n_subsamples},
            {"lasso", lasso_params_json(cfg.stability.lasso)}}},
          {"max_rule_length", cfg.max_rule_length},
          {"min_support", cfg.min_support},
          {"clip", cfg.clip},
          {"seed", seed}};
}

nlohmann::json candidate_rules_json(const DiscoveryOutput& out, const std::vector<std::string>& column_names,
                                    const DiscoveryConfig& cfg, std::uint64_t seed) {
  nlohmann::json rules = nlohmann::json::array();
  for (std::size_t m = 0; m < out.candidate_rules.size(); ++m) {
    nlohmann::json r = rule_to_json(out.candidate_rules[m], column_names);
    r["support"] = out.candidate_support(static_cast<int>(m));
    rules.push_back(std::move(r));
  }
  nlohmann::json dropped = nlohmann::json::array();
  for (const auto& d : out.dropped_candidates) dropped.push_back({{"label", d.label}, {"reason", d.reason}});
  return {{"rules", std::move(rules)}, {"dropped", std::move(dropped)}, {"config", discovery_config_json(cfg, seed)}};
}

nlohmann::json selection_report_json(const DiscoveryOutput& out, const std::vector<std::string>& column_names,
                                     const DiscoveryConfig& cfg, std::uint64_t seed) {
  nlohmann::json rules = nlohmann::json::array();
  std::vector<char> selected(out.candidate_rules.size(), 0);
  for (const int j : out.selection.selected) selected[static_cast<std::size_t>(j)] = 1;
  for (std::size_t m = 0; m < out.candidate_rules.size(); ++m) {
    nlohmann::json r = rule_to_json(out.candidate_rules[m], column_names);
    r["support"] = out.candidate_support(static_cast<int>(m));
    r["selection_probability"] = out.selection.selection_probability(static_cast<int>(m));
    r["selected"] = static_cast<bool>(selected[m]);
    rules.push_back(std::move(r));
  }
  return {{"rules", std::move(rules)},
          {"threshold", out.selection.threshold},
          {"q_max", out.selection.q_max},
          {"n_subsamples", out.selection.n_subsamples},
          {"config", discovery_config_json(cfg, seed)}};
}

std::vector<Rule> rules_from_report_json(const nlohmann::json& j, const std::vector<std::string>& column_names) {
  const nlohmann::json* arr = nullptr;
  if (j.is_array()) {
    arr = &j;
  } else if (j.is_object() && j.contains("rules") && j["rules"].is_array()) {
    arr = &j["rules"];
  } else {
    throw schema_error("rules JSON must be an array or an object with a 'rules' array");
  }
  std::vector<Rule> out;
  for (const auto& rj : *arr) {
    if (rj.is_object() && rj.contains("selected") && !rj["selected"].get<bool>()) continue;
    out.push_back(rule_from_json(rj, column_names));
  }
  return out;
}

nlohmann::json estimation_config_json(const EstimationConfig& cfg, std::uint64_t seed) {
  return {{"method", pseudo_method_name(cfg.method)},
          {"alpha", cfg.inference.alpha},
          {"hc_flavor", hc_flavor_name(cfg.inference.flavor)},
          {"wald_include_intercept", cfg.inference.wald_include_intercept},
          {"ensemble", ensemble_params_json(cfg.ensemble)},
          {"clip", cfg.clip},
          {"seed", seed}};
}

nlohmann::json inference_report_json(const EstimationOutput& out, const std::vector<std::string>& column_names,
                                     const EstimationConfig& cfg, std::uint64_t seed, int n_inference) {
  nlohmann::json coefficients = nlohmann::json::array();
  for (const auto& c : out.report.coefficients) {
    coefficients.push_back({{"label", c.label},
                            {"estimate", c.estimate},
                            {"se", c.se},
                            {"ci_lower", c.ci_lower},
                            {"ci_upper", c.ci_upper}});
  }
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : out.report.rules) rules.push_back(rule_to_json(r, column_names));
  nlohmann::json dropped = nlohmann::json::array();
  for (const auto& d : out.report.dropped) dropped.push_back({{"label", d.label}, {"reason", d.reason}});

  const auto& res = out.report.result;
  return {{"coefficients", std::move(coefficients)},
          {"rules", std::move(rules)},
          {"dropped", std::move(dropped)},
          {"wald", {{"stat", res.wald_stat}, {"df", res.wald_df}, {"critical", res.wald_critical}, {"reject", res.wald_reject}}},
          {"alpha", res.alpha},
          {"hc_flavor", hc_flavor_name(res.hc_flavor)},
          {"n", n_inference},
          {"config", estimation_config_json(cfg, seed)}};
}

std::string inference_report_text(const InferenceReport& report) {
  std::size_t width = 12;
  for (const auto& c : report.coefficients) width = std::max(width, c.label.size());
  width += 2;

  std::string text = pad("rule", width) + pad("estimate", 12) + pad("se", 12) + "95% CI\n";
  for (const auto& c : report.coefficients) {
    text += pad(c.label, width) + pad(fixed4(c.estimate), 12) + pad(fixed4(c.se), 12) + "[" + fixed4(c.ci_lower) +
            ", " + fixed4(c.ci_upper) + "]\n";
  }
  const auto& res = report.result;
  text += "\nWald: T = " + fixed4(res.wald_stat) + ", df = " + std::to_string(res.wald_df) +
          ", critical = " + fixed4(res.wald_critical) + ", reject = " + (res.wald_reject ? "yes" : "no") +
          " (alpha = " + fixed4(res.alpha) + ", " + hc_flavor_name(res.hc_flavor) + ")\n";
  for (const auto& d : report.dropped) {
    text += "dropped: " + d.label + " (" + d.reason + ")\n";
  }
  return text;
}

nlohmann::json sensitivity_config_json(const SensitivityConfig& cfg) {
  return {{"lambda_grid", cfg.lambda_values}, {"n_bootstrap", cfg.n_bootstrap}, {"alpha", cfg.alpha},
          {"clip", cfg.clip},               {"max_redraws", cfg.max_redraws},  {"seed", cfg.seed}};
}

nlohmann::json sensitivity_report_json(const SensitivityResult& result, const SensitivityConfig& cfg) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : result.rows) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : row.cells) {
      cells.push_back({{"lambda", c.lambda}, {"lower", c.lower}, {"upper", c.upper}});
    }
    nlohmann::json r = {{"label", row.label}, {"cells", std::move(cells)}};
    if (std::isfinite(row.lambda_star)) {
      r["lambda_star"] = row.lambda_star;
    } else {
      r["lambda_star"] = nullptr;
    }
    rows.push_back(std::move(r));
  }
  return {{"rows", std::move(rows)},
          {"lambda_grid", result.lambda_values},
          {"n_bootstrap", result.n_bootstrap},
          {"alpha", result.alpha},
          {"config", sensitivity_config_json(cfg)}};
}

std::string sensitivity_report_text(const SensitivityResult& result) {
  std::size_t width = 12;
  for (const auto& row : result.rows) width = std::max(width, row.label.size());
  width += 2;

  std::string text = pad("rule", width);
  for (const double lam : result.lambda_values) text += pad("lambda=" + fixed4(lam), 22);
  text += "lambda*\n";
  for (const auto& row : result.rows) {
    text += pad(row.label, width);
    for (const auto& c : row.cells) text += pad("[" + fixed4(c.lower) + ", " + fixed4(c.upper) + "]", 22);
    text += std::isfinite(row.lambda_star) ? fixed4(row.lambda_star) : std::string("none");
    text += "\n";
  }
  return text;
}

nlohmann::json discovery_metrics_json(const DiscoveryMetrics& m, const DgpSpec& spec) {
  return {{"spec", dgp_spec_json(spec)},
          {"metrics",
           {{"cdr", m.cdr},
            {"pi_all", m.pi_all},
            {"dr", m.dr},
            {"n_true_rules", m.n_true_rules},
            {"replicates_ok", m.replicates_ok},
            {"replicates_failed", m.replicates_failed}}}};
}

nlohmann::json estimation_metrics_json(const std::vector<EstimationMetrics>& ms, const DgpSpec& spec) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& m : ms) {
    rows.push_back({{"ratio", m.ratio},
                    {"mean_rmse", m.mean_rmse},
                    {"replicates_ok", m.replicates_ok},
                    {"replicates_failed", m.replicates_failed}});
  }
  return {{"spec", dgp_spec_json(spec)}, {"results", std::move(rows)}};
}

std::string metrics_csv(const std::vector<std::pair<std::string, DiscoveryMetrics>>& rows) {
  std::string csv = "grid_point,metric,value\n";
  for (const auto& [name, m] : rows) {
    csv += name + ",cdr," + format_threshold(m.cdr) + "\n";
    csv += name + ",pi_all," + format_threshold(m.pi_all) + "\n";
    csv += name + ",dr," + format_threshold(m.dr) + "\n";
    csv += name + ",replicates_ok," + std::to_string(m.replicates_ok) + "\n";
    csv += name + ",replicates_failed," + std::to_string(m.replicates_failed) + "\n";
  }
  return csv;
}

std::string estimation_metrics_csv(const std::vector<EstimationMetrics>& ms) {
  std::string csv = "ratio,metric,value\n";
  for (const auto& m : ms) {
    csv += format_threshold(m.ratio) + ",mean_rmse," + format_threshold(m.mean_rmse) + "\n";
    csv += format_threshold(m.ratio) + ",replicates_ok," + std::to_string(m.replicates_ok) + "\n";
    csv += format_threshold(m.ratio) + ",replicates_failed," + std::to_string(m.replicates_failed) + "\n";
  }
  return csv;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw parse_error("write failure on '" + path + "'");
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error("invalid JSON in '" + path + "': " + e.what());
  }
  return j;
}

}  // namespace cre
