#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "cre/rules.hpp"
#include "cre/tree.hpp"

namespace cre {

struct EnsembleParams {
  int n_trees_forest = 200;
  int n_trees_boost = 200;
  int max_depth = 3;
  long long min_leaf = 20;
  double learning_rate = 0.01;
  double subsample_fraction = 0.5;    // boosting row subsample
  double feature_fraction_forest = 0; // 0 means auto: ceil(sqrt(K))/K
  bool bootstrap_forest = true;
  std::uint64_t seed = 0;

  void validate() const;
  int forest_mtry(int k) const;  // features tried per split, from the fraction
};

// Bagged trees with per-split feature subsampling. Tree t draws all its
// randomness from derive_seed(params.seed, stream::forest, t), so results are
// identical whether trees are fit serially or in parallel.
std::vector<Tree> fit_random_forest(const Eigen::MatrixXd& x, const Eigen::VectorXd& target,
                                    const EnsembleParams& params, int n_threads = 1);

struct GradientBoosting {
  double base_offset = 0.0;
  double learning_rate = 0.01;
  std::vector<Tree> trees;
};

// Least-squares boosting: stage t fits a tree to the current residuals on a
// without-replacement row subsample (stream: boost, index t). Sequential by
// definition.
GradientBoosting fit_gradient_boosting(const Eigen::MatrixXd& x, const Eigen::VectorXd& target,
                                       const EnsembleParams& params);

double predict_forest(const std::vector<Tree>& trees, const Eigen::Ref<const Eigen::RowVectorXd>& x);
double predict_boosting(const GradientBoosting& gb, const Eigen::Ref<const Eigen::RowVectorXd>& x);
Eigen::VectorXd predict_boosting_rows(const GradientBoosting& gb, const Eigen::MatrixXd& x);

// Emits the canonical rule of every non-root node of every tree, drops rules
// longer than max_length conditions or with training support outside
// (min_support, 1-min_support), and removes duplicates keeping first
// occurrence order.
std::vector<Rule> extract_rules(const std::vector<Tree>& trees, const Eigen::MatrixXd& x,
                                const std::vector<std::string>& column_names, int max_length = 3,
                                double min_support = 0.02);

nlohmann::json tree_to_json(const Tree& t);
Tree tree_from_json(const nlohmann::json& j);

}  // namespace cre
