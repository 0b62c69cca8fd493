#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace cre {

class Rng;

// Node in a binary regression tree. feature < 0 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;   // child index within Tree::nodes
  int right = -1;
  double prediction = 0.0;  // mean of targets routed here
  int depth = 0;
  long long n_samples = 0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

// Row indices of x sorted ascending by value, one order per column; ties keep
// ascending row index. Computed once per dataset and shared across trees.
struct Presort {
  std::vector<std::vector<int>> order;
};

Presort presort_columns(const Eigen::MatrixXd& x);

struct TreeFitConfig {
  int max_depth = 3;
  long long min_leaf = 20;
  int mtry = 0;  // features tried per split; 0 or >=K means all (no rng draw)
};

// Greedy variance-reduction CART on the rows whose multiplicity count is
// positive. counts[i] is row i's weight (bootstrap multiplicity). rng is only
// consumed when mtry restricts the feature set; pass nullptr otherwise.
// Ties in impurity reduction break toward the lowest covariate index, then
// the lowest threshold.
Tree fit_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, const std::vector<long long>& counts,
              const TreeFitConfig& cfg, const Presort& presort, Rng* rng);

// Convenience wrapper: all rows with weight 1, every feature available.
Tree fit_regression_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, int max_depth = 3,
                         long long min_leaf = 20);

}  // namespace cre
