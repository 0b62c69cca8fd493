#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cre/dataset.hpp"
#include "cre/ensemble.hpp"
#include "cre/inference.hpp"
#include "cre/propensity.hpp"
#include "cre/pseudo_outcome.hpp"
#include "cre/rules.hpp"
#include "cre/stability.hpp"

namespace cre {

// Parameters of the discovery stage (pseudo-outcomes on the discovery sample,
// tree ensembles, rule extraction, stability selection).
struct DiscoveryConfig {
  PseudoMethod method = PseudoMethod::IMPUTE_DIFF;
  EnsembleParams ensemble;  // seed field is ignored; the stage seed is used
  StabilityParams stability;
  int max_rule_length = 3;
  double min_support = 0.02;
  double clip = 0.01;  // propensity clip when method is ipw/sipw
  int n_threads = 1;
  // required when method == EXTERNAL: pseudo-outcomes aligned to the
  // discovery rows
  std::optional<Eigen::VectorXd> external_tau;
};

struct DiscoveryOutput {
  Eigen::VectorXd tau_hat;
  std::optional<PropensityModel> propensity;  // present for ipw/sipw
  std::vector<Rule> candidate_rules;          // surviving build_rule_matrix
  std::vector<DroppedRule> dropped_candidates;
  Eigen::VectorXd candidate_support;          // discovery-sample support per candidate
  StabilitySelectionResult selection;         // indexed like candidate_rules
  std::vector<Rule> selected_rules;
};

// All stage randomness derives from `seed` via the fixed stream constants, so
// rerunning any stage with the same seed reproduces it exactly.
DiscoveryOutput run_discovery(const Dataset& d_disc, const DiscoveryConfig& cfg, std::uint64_t seed);

struct EstimationConfig {
  PseudoMethod method = PseudoMethod::SIPW;
  InferenceOptions inference;
  EnsembleParams ensemble;  // for or/impute_diff outcome models
  double clip = 0.01;
  std::optional<Eigen::VectorXd> external_tau;  // aligned to the inference rows
};

struct EstimationOutput {
  Eigen::VectorXd tau_star;
  std::optional<PropensityModel> propensity;
  InferenceReport report;
};

EstimationOutput run_estimation(const Dataset& d_inf, const std::vector<Rule>& rules, const EstimationConfig& cfg,
                                std::uint64_t seed);

// Pseudo-outcomes for one subsample under the given method; fits whatever
// models the method needs on that subsample.
Eigen::VectorXd compute_pseudo_outcomes(const Dataset& d, PseudoMethod method, const EnsembleParams& ensemble,
                                        double clip, std::uint64_t seed, std::optional<PropensityModel>* fitted);

}  // namespace cre
