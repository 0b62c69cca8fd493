#include "cre/pipeline.hpp"

#include "cre/errors.hpp"
#include "cre/rng.hpp"

namespace cre {

Eigen::VectorXd compute_pseudo_outcomes(const Dataset& d, PseudoMethod method, const EnsembleParams& ensemble,
                                        double clip, std::uint64_t seed, std::optional<PropensityModel>* fitted) {
  if (fitted) fitted->reset();
  switch (method) {
    case PseudoMethod::IPW:
    case PseudoMethod::SIPW: {
      const PropensityModel pm = fit_logistic(d.x, d.z, 100, 1e-8, clip);
      const Eigen::VectorXd e_hat = propensity_scores(pm, d.x);
      if (fitted) *fitted = pm;
      return method == PseudoMethod::IPW ? ipw_pseudo(d, e_hat).tau_star : sipw_pseudo(d, e_hat).tau_star;
    }
    case PseudoMethod::OR:
    case PseudoMethod::IMPUTE_DIFF: {
      EnsembleParams params = ensemble;
      params.seed = seed;
      const OutcomeModel om = fit_outcome_models(d, params);
      return method == PseudoMethod::OR ? or_pseudo(d, om).tau_star : impute_diff_pseudo(d, om).tau_star;
    }
    case PseudoMethod::EXTERNAL:
      throw contract_error("external pseudo-outcomes must be supplied by the caller");
  }
  throw contract_error("unknown pseudo-outcome method");
}

DiscoveryOutput run_discovery(const Dataset& d_disc, const DiscoveryConfig& cfg, std::uint64_t seed) {
  DiscoveryOutput out;

  if (cfg.method == PseudoMethod::EXTERNAL) {
    if (!cfg.external_tau || cfg.external_tau->size() != d_disc.n()) {
      throw alignment_error("external discovery pseudo-outcomes missing or misaligned");
    }
    out.tau_hat = *cfg.external_tau;
  } else {
    std::optional<PropensityModel> pm;
    out.tau_hat = compute_pseudo_outcomes(d_disc, cfg.method, cfg.ensemble, cfg.clip, seed, &pm);
    out.propensity = pm;
  }

  EnsembleParams params = cfg.ensemble;
  params.seed = seed;
  std::vector<Tree> trees = fit_random_forest(d_disc.x, out.tau_hat, params, cfg.n_threads);
  const GradientBoosting gb = fit_gradient_boosting(d_disc.x, out.tau_hat, params);
  trees.insert(trees.end(), gb.trees.begin(), gb.trees.end());

  const std::vector<Rule> raw_rules =
      extract_rules(trees, d_disc.x, d_disc.column_names, cfg.max_rule_length, cfg.min_support);
  RuleMatrix rm = build_rule_matrix(raw_rules, d_disc);
  out.candidate_rules = rm.rules;
  out.dropped_candidates = rm.dropped;
  out.candidate_support = rm.values.colwise().mean();

  out.selection = stability_select(rm, out.tau_hat, cfg.stability, seed, cfg.n_threads);
  for (const int j : out.selection.selected) {
    out.selected_rules.push_back(out.candidate_rules[static_cast<std::size_t>(j)]);
  }
  return out;
}

EstimationOutput run_estimation(const Dataset& d_inf, const std::vector<Rule>& rules, const EstimationConfig& cfg,
                                std::uint64_t seed) {
  EstimationOutput out;
  if (cfg.method == PseudoMethod::EXTERNAL) {
    if (!cfg.external_tau || cfg.external_tau->size() != d_inf.n()) {
      throw alignment_error("external inference pseudo-outcomes missing or misaligned");
    }
    out.tau_star = *cfg.external_tau;
  } else {
    std::optional<PropensityModel> pm;
    out.tau_star = compute_pseudo_outcomes(d_inf, cfg.method, cfg.ensemble, cfg.clip, seed, &pm);
    out.propensity = pm;
  }
  out.report = run_inference(d_inf, rules, out.tau_star, cfg.inference);
  return out;
}

}  // namespace cre
