#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cre/lasso.hpp"
#include "cre/rules.hpp"

namespace cre {

struct StabilityParams {
  double threshold = 0.8;
  int q_max = 20;        // path entrants counted per subsample
  int n_subsamples = 50;
  LassoParams lasso;
};

struct StabilitySelectionResult {
  Eigen::VectorXd selection_probability;  // per candidate rule, in [0,1]
  std::vector<int> selected;              // indices with probability >= threshold
  double threshold = 0.8;
  int n_subsamples = 0;
  int q_max = 0;
};

// Runs lasso_path on n_subsamples random half-samples (size floor(N/2), drawn
// without replacement; subsample b uses stream stability/b) and scores each
// rule by how often it is among the first q_max path entrants. Subsamples are
// independent, so parallel execution reproduces the serial result.
StabilitySelectionResult stability_select(const RuleMatrix& x_rules, const Eigen::VectorXd& tau_hat,
                                          const StabilityParams& params, std::uint64_t seed, int n_threads = 1);

}  // namespace cre
