#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cre/dataset.hpp"
#include "cre/pipeline.hpp"
#include "cre/rules.hpp"

namespace cre {

enum class Modifiers { X123, X8910 };
enum class Confounding { Linear, Nonlinear };

// Synthetic design: 10 binary covariates (marginal 0.5, equicorrelated via a
// dichotomized latent Gaussian), propensity expit(-1 + x1 - x2 + x3),
// Y(0) ~ N(f(X), 1) and Y(1) = Y(0) + tau(X).
struct DgpSpec {
  int n = 1000;
  double k_effect = 1.0;
  int n_rules = 2;  // 2 or 4
  Modifiers effect_modifiers = Modifiers::X123;
  double correlation = 0.0;  // target pairwise correlation of the binary covariates
  Confounding confounding = Confounding::Linear;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimTruth {
  Eigen::VectorXd tau_true;
  Eigen::VectorXd y0;
  Eigen::VectorXd y1;
  std::vector<Rule> true_rules;
};

std::pair<Dataset, SimTruth> generate(const DgpSpec& spec);

struct DiscoveryMetrics {
  double cdr = 0.0;     // mean correctly discovered true rules
  double pi_all = 0.0;  // fraction of replicates discovering every true rule
  double dr = 0.0;      // mean number of selected rules
  int n_true_rules = 0;
  int replicates_ok = 0;
  int replicates_failed = 0;
};

struct DiscoveryExperimentConfig {
  double split_ratio = 0.25;
  DiscoveryConfig discovery;
  int n_threads = 1;
};

// Per replicate: fresh draw with a seed derived from (spec.seed, replicate),
// split, run the discovery stage on the discovery subsample, count a true
// rule as discovered when some selected rule has the identical truth table on
// the full draw. Replicates that fail with a library error are counted and
// excluded from the averages.
DiscoveryMetrics run_discovery_experiment(const DgpSpec& spec, int replicates, const DiscoveryExperimentConfig& cfg);

struct EstimationMetrics {
  double ratio = 0.0;
  double mean_rmse = 0.0;  // RMSE of fitted tau(x) against the true tau over the full draw
  int replicates_ok = 0;
  int replicates_failed = 0;
};

struct EstimationExperimentConfig {
  DiscoveryConfig discovery;
  EstimationConfig estimation;
  bool oracle_rules = false;  // skip discovery, use the DGP's true rules
  int n_threads = 1;
};

std::vector<EstimationMetrics> run_estimation_experiment(const DgpSpec& spec, const std::vector<double>& ratios,
                                                         int replicates, const EstimationExperimentConfig& cfg);

}  // namespace cre
