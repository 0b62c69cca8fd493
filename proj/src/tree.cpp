#include "cre/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cre/errors.hpp"
#include "cre/rng.hpp"

namespace cre {

double Tree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  int id = 0;
  while (!nodes[static_cast<std::size_t>(id)].is_leaf()) {
    const TreeNode& node = nodes[static_cast<std::size_t>(id)];
    id = x(node.feature) <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(id)].prediction;
}

Presort presort_columns(const Eigen::MatrixXd& x) {
  const int n = static_cast<int>(x.rows());
  const int k = static_cast<int>(x.cols());
  Presort p;
  p.order.resize(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    auto& ord = p.order[static_cast<std::size_t>(j)];
    ord.resize(static_cast<std::size_t>(n));
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&x, j](int a, int b) {
      const double va = x(a, j), vb = x(b, j);
      return va < vb || (va == vb && a < b);
    });
  }
  return p;
}

namespace {

// Split-scan bookkeeping for one frontier node.
struct NodeWork {
  long long cnt = 0;
  double sum = 0.0;
  double sumsq = 0.0;
  std::vector<char> allowed;  // empty means all features allowed
  // running left-side stats during a column walk
  long long run_cnt = 0;
  double run_sum = 0.0;
  double prev_value = 0.0;
  bool has_prev = false;
  // best split so far
  int best_feature = -1;
  double best_threshold = 0.0;
  double best_gain = 0.0;
};

}  // namespace

Tree fit_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, const std::vector<long long>& counts,
              const TreeFitConfig& cfg, const Presort& presort, Rng* rng) {
  const int n = static_cast<int>(x.rows());
  const int k = static_cast<int>(x.cols());
  if (static_cast<int>(counts.size()) != n || target.size() != n) {
    throw contract_error("tree fit: row counts/target length mismatch");
  }
  if (cfg.max_depth < 0 || cfg.min_leaf < 1) throw domain_error("tree fit: bad depth or leaf size");

  long long total_cnt = 0;
  double total_sum = 0.0, total_sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    if (counts[static_cast<std::size_t>(i)] < 0) throw contract_error("negative row multiplicity");
    const double c = static_cast<double>(counts[static_cast<std::size_t>(i)]);
    total_cnt += counts[static_cast<std::size_t>(i)];
    total_sum += c * target(i);
    total_sumsq += c * target(i) * target(i);
  }
  if (total_cnt == 0) throw domain_error("tree fit: no rows with positive multiplicity");

  const bool restrict_features = rng != nullptr && cfg.mtry > 0 && cfg.mtry < k;
  const auto draw_allowed = [&]() {
    std::vector<char> allowed;
    if (restrict_features) {
      allowed.assign(static_cast<std::size_t>(k), 0);
      for (int j : rng->sample_without_replacement(k, cfg.mtry)) allowed[static_cast<std::size_t>(j)] = 1;
    }
    return allowed;
  };

  Tree tree;
  tree.nodes.push_back({-1, 0.0, -1, -1, total_sum / static_cast<double>(total_cnt), 0, total_cnt});

  std::vector<int> node_of_row(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) node_of_row[static_cast<std::size_t>(i)] = counts[static_cast<std::size_t>(i)] > 0 ? 0 : -1;

  std::vector<int> frontier;
  std::vector<NodeWork> work;
  if (cfg.max_depth > 0 && total_cnt >= 2 * cfg.min_leaf) {
    frontier.push_back(0);
    NodeWork w;
    w.cnt = total_cnt;
    w.sum = total_sum;
    w.sumsq = total_sumsq;
    w.allowed = draw_allowed();
    work.push_back(std::move(w));
  }

  std::vector<int> slot_of_node(1, -1);
  for (int depth = 0; depth < cfg.max_depth && !frontier.empty(); ++depth) {
    slot_of_node.assign(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < frontier.size(); ++s) slot_of_node[static_cast<std::size_t>(frontier[s])] = static_cast<int>(s);

    for (int j = 0; j < k; ++j) {
      for (auto& w : work) {
        w.run_cnt = 0;
        w.run_sum = 0.0;
        w.has_prev = false;
      }
      for (const int row : presort.order[static_cast<std::size_t>(j)]) {
        const int nid = node_of_row[static_cast<std::size_t>(row)];
        if (nid < 0) continue;
        const int slot = slot_of_node[static_cast<std::size_t>(nid)];
        if (slot < 0) continue;
        NodeWork& w = work[static_cast<std::size_t>(slot)];
        if (!w.allowed.empty() && !w.allowed[static_cast<std::size_t>(j)]) continue;

        const double v = x(row, j);
        if (w.has_prev && v > w.prev_value && w.run_cnt >= cfg.min_leaf && w.cnt - w.run_cnt >= cfg.min_leaf) {
          const long long rc = w.cnt - w.run_cnt;
          const double rs = w.sum - w.run_sum;
          const double gain = w.run_sum * w.run_sum / static_cast<double>(w.run_cnt) +
                              rs * rs / static_cast<double>(rc) - w.sum * w.sum / static_cast<double>(w.cnt);
          const double eps = 1e-12 * (w.sumsq + 1.0);
          if (gain > w.best_gain + eps) {
            double thr = w.prev_value + 0.5 * (v - w.prev_value);
            if (!(thr < v)) thr = w.prev_value;  // adjacent doubles: keep the split nondegenerate
            w.best_gain = gain;
            w.best_feature = j;
            w.best_threshold = thr;
          }
        }
        const long long c = counts[static_cast<std::size_t>(row)];
        w.run_cnt += c;
        w.run_sum += static_cast<double>(c) * target(row);
        w.prev_value = v;
        w.has_prev = true;
      }
    }

    // materialize the chosen splits, route rows, build the next frontier
    std::vector<int> next_frontier;
    std::vector<NodeWork> next_work;
    std::vector<char> node_split(tree.nodes.size(), 0);
    for (std::size_t s = 0; s < frontier.size(); ++s) {
      const NodeWork& w = work[s];
      if (w.best_feature < 0) continue;
      const int nid = frontier[s];
      TreeNode& node = tree.nodes[static_cast<std::size_t>(nid)];
      node.feature = w.best_feature;
      node.threshold = w.best_threshold;
      node.left = static_cast<int>(tree.nodes.size());
      node.right = node.left + 1;
      tree.nodes.push_back({-1, 0.0, -1, -1, 0.0, depth + 1, 0});
      tree.nodes.push_back({-1, 0.0, -1, -1, 0.0, depth + 1, 0});
      node_split[static_cast<std::size_t>(nid)] = 1;
    }

    // per-child stats (cnt, sum, sumsq)
    std::vector<long long> ccnt(tree.nodes.size(), 0);
    std::vector<double> csum(tree.nodes.size(), 0.0), csumsq(tree.nodes.size(), 0.0);
    for (int row = 0; row < n; ++row) {
      int& nid = node_of_row[static_cast<std::size_t>(row)];
      if (nid < 0 || !node_split[static_cast<std::size_t>(nid)]) continue;
      const TreeNode& node = tree.nodes[static_cast<std::size_t>(nid)];
      nid = x(row, node.feature) <= node.threshold ? node.left : node.right;
      const double c = static_cast<double>(counts[static_cast<std::size_t>(row)]);
      ccnt[static_cast<std::size_t>(nid)] += counts[static_cast<std::size_t>(row)];
      csum[static_cast<std::size_t>(nid)] += c * target(row);
      csumsq[static_cast<std::size_t>(nid)] += c * target(row) * target(row);
    }
    for (std::size_t s = 0; s < frontier.size(); ++s) {
      const int nid = frontier[s];
      if (!node_split[static_cast<std::size_t>(nid)]) continue;
      const TreeNode& node = tree.nodes[static_cast<std::size_t>(nid)];
      for (const int child : {node.left, node.right}) {
        TreeNode& cn = tree.nodes[static_cast<std::size_t>(child)];
        cn.n_samples = ccnt[static_cast<std::size_t>(child)];
        cn.prediction = csum[static_cast<std::size_t>(child)] / static_cast<double>(cn.n_samples);
        if (depth + 1 < cfg.max_depth && cn.n_samples >= 2 * cfg.min_leaf) {
          next_frontier.push_back(child);
          NodeWork w;
          w.cnt = cn.n_samples;
          w.sum = csum[static_cast<std::size_t>(child)];
          w.sumsq = csumsq[static_cast<std::size_t>(child)];
          w.allowed = draw_allowed();
          next_work.push_back(std::move(w));
        }
      }
    }
    frontier = std::move(next_frontier);
    work = std::move(next_work);
  }
  return tree;
}

Tree fit_regression_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, int max_depth, long long min_leaf) {
  const Presort presort = presort_columns(x);
  const std::vector<long long> counts(static_cast<std::size_t>(x.rows()), 1);
  TreeFitConfig cfg;
  cfg.max_depth = max_depth;
  cfg.min_leaf = min_leaf;
  return fit_tree(x, target, counts, cfg, presort, nullptr);
}

}  // namespace cre
