#include "cre/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "cre/errors.hpp"
#include "cre/parallel.hpp"
#include "cre/rng.hpp"

namespace cre {

void EnsembleParams::validate() const {
  if (n_trees_forest < 0 || n_trees_boost < 0) throw domain_error("tree counts must be nonnegative");
  if (max_depth < 1) throw domain_error("max_depth must be positive");
  if (min_leaf < 1) throw domain_error("min_leaf must be positive");
  if (!(learning_rate > 0.0)) throw domain_error("learning_rate must be positive");
  if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0)) {
    throw domain_error("subsample_fraction must lie in (0,1]");
  }
  if (feature_fraction_forest < 0.0 || feature_fraction_forest > 1.0) {
    throw domain_error("feature_fraction_forest must lie in [0,1] (0 = auto)");
  }
}

int EnsembleParams::forest_mtry(int k) const {
  if (k < 1) throw domain_error("need at least one covariate");
  double frac = feature_fraction_forest;
  if (frac == 0.0) frac = std::ceil(std::sqrt(static_cast<double>(k))) / static_cast<double>(k);
  const int mtry = static_cast<int>(std::ceil(frac * static_cast<double>(k)));
  return std::clamp(mtry, 1, k);
}

std::vector<Tree> fit_random_forest(const Eigen::MatrixXd& x, const Eigen::VectorXd& target,
                                    const EnsembleParams& params, int n_threads) {
  params.validate();
  const int n = static_cast<int>(x.rows());
  if (n < 1 || target.size() != n) throw contract_error("forest fit: bad input shapes");

  const Presort presort = presort_columns(x);
  TreeFitConfig cfg;
  cfg.max_depth = params.max_depth;
  cfg.min_leaf = params.min_leaf;
  cfg.mtry = params.forest_mtry(static_cast<int>(x.cols()));

  std::vector<Tree> trees(static_cast<std::size_t>(params.n_trees_forest));
  parallel_for(params.n_trees_forest, n_threads, [&](int t) {
    Rng rng(derive_seed(params.seed, stream::forest, static_cast<std::uint64_t>(t)));
    std::vector<long long> counts(static_cast<std::size_t>(n), 1);
    if (params.bootstrap_forest) {
      std::fill(counts.begin(), counts.end(), 0);
      for (const int row : rng.sample_with_replacement(n, n)) ++counts[static_cast<std::size_t>(row)];
    }
    trees[static_cast<std::size_t>(t)] = fit_tree(x, target, counts, cfg, presort, &rng);
  });
  return trees;
}

GradientBoosting fit_gradient_boosting(const Eigen::MatrixXd& x, const Eigen::VectorXd& target,
                                       const EnsembleParams& params) {
  params.validate();
  const int n = static_cast<int>(x.rows());
  if (n < 1 || target.size() != n) throw contract_error("boosting fit: bad input shapes");

  const Presort presort = presort_columns(x);
  TreeFitConfig cfg;
  cfg.max_depth = params.max_depth;
  cfg.min_leaf = params.min_leaf;

  GradientBoosting gb;
  gb.learning_rate = params.learning_rate;
  gb.base_offset = target.mean();
  gb.trees.reserve(static_cast<std::size_t>(params.n_trees_boost));

  Eigen::VectorXd residual = target.array() - gb.base_offset;
  const int m = std::clamp(static_cast<int>(std::lround(params.subsample_fraction * n)), 1, n);
  for (int t = 0; t < params.n_trees_boost; ++t) {
    Rng rng(derive_seed(params.seed, stream::boost, static_cast<std::uint64_t>(t)));
    std::vector<long long> counts(static_cast<std::size_t>(n), 0);
    for (const int row : rng.sample_without_replacement(n, m)) counts[static_cast<std::size_t>(row)] = 1;
    Tree tree = fit_tree(x, residual, counts, cfg, presort, nullptr);
    for (int i = 0; i < n; ++i) residual(i) -= params.learning_rate * tree.predict(x.row(i));
    gb.trees.push_back(std::move(tree));
  }
  return gb;
}

double predict_forest(const std::vector<Tree>& trees, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (trees.empty()) throw contract_error("empty forest");
  double s = 0.0;
  for (const auto& t : trees) s += t.predict(x);
  return s / static_cast<double>(trees.size());
}

double predict_boosting(const GradientBoosting& gb, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  double s = gb.base_offset;
  for (const auto& t : gb.trees) s += gb.learning_rate * t.predict(x);
  return s;
}

Eigen::VectorXd predict_boosting_rows(const GradientBoosting& gb, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  for (int i = 0; i < x.rows(); ++i) out(i) = predict_boosting(gb, x.row(i));
  return out;
}

namespace {

void collect_node_rules(const Tree& tree, int node_id, std::vector<Condition>& path,
                        const std::vector<std::string>& column_names, std::vector<Rule>& out) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
  if (node_id != 0) out.push_back(make_rule(path, column_names));
  if (node.is_leaf()) return;
  path.push_back({node.feature, Direction::LE, node.threshold});
  collect_node_rules(tree, node.left, path, column_names, out);
  path.back().direction = Direction::GT;
  collect_node_rules(tree, node.right, path, column_names, out);
  path.pop_back();
}

}  // namespace

std::vector<Rule> extract_rules(const std::vector<Tree>& trees, const Eigen::MatrixXd& x,
                                const std::vector<std::string>& column_names, int max_length, double min_support) {
  if (trees.empty()) throw contract_error("extract_rules: no trees");
  if (!(min_support >= 0.0 && min_support < 0.5)) throw domain_error("min_support must lie in [0, 0.5)");
  const int n = static_cast<int>(x.rows());

  std::vector<Rule> raw;
  for (const auto& tree : trees) {
    std::vector<Condition> path;
    collect_node_rules(tree, 0, path, column_names, raw);
  }

  std::vector<Rule> kept;
  for (auto& rule : raw) {
    if (static_cast<int>(rule.conditions.size()) > max_length) continue;
    if (std::find(kept.begin(), kept.end(), rule) != kept.end()) continue;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += evaluate_rule(rule, x.row(i));
    const double support = static_cast<double>(hits) / static_cast<double>(n);
    if (!(support > min_support && support < 1.0 - min_support)) continue;
    kept.push_back(std::move(rule));
  }
  if (kept.empty()) {
    throw rule_generation_error(
        "no rules survive length/support filters; loosen min_support, raise max_length, or grow deeper trees");
  }
  return kept;
}

nlohmann::json tree_to_json(const Tree& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : t.nodes) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"prediction", n.prediction},
                     {"depth", n.depth},
                     {"n_samples", n.n_samples}});
  }
  return {{"nodes", std::move(nodes)}};
}

Tree tree_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array() || j["nodes"].empty()) {
    throw schema_error("tree JSON must contain a nonempty 'nodes' array");
  }
  Tree t;
  for (const auto& nj : j["nodes"]) {
    TreeNode n;
    n.feature = nj.at("feature").get<int>();
    n.threshold = nj.at("threshold").get<double>();
    n.left = nj.at("left").get<int>();
    n.right = nj.at("right").get<int>();
    n.prediction = nj.at("prediction").get<double>();
    n.depth = nj.at("depth").get<int>();
    n.n_samples = nj.at("n_samples").get<long long>();
    t.nodes.push_back(n);
  }
  return t;
}

}  // namespace cre
