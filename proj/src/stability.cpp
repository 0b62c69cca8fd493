#include "cre/stability.hpp"

#include <algorithm>
#include <string>

#include "cre/errors.hpp"
#include "cre/parallel.hpp"
#include "cre/rng.hpp"

namespace cre {

StabilitySelectionResult stability_select(const RuleMatrix& x_rules, const Eigen::VectorXd& tau_hat,
                                          const StabilityParams& params, std::uint64_t seed, int n_threads) {
  const int n = static_cast<int>(x_rules.values.rows());
  const int m = static_cast<int>(x_rules.values.cols());
  if (tau_hat.size() != n) throw contract_error("stability_select: target length mismatch");
  if (n < 4) throw domain_error("stability selection needs at least 4 rows");
  if (params.n_subsamples < 1) throw domain_error("n_subsamples must be positive");
  if (params.q_max < 1) throw domain_error("q_max must be positive");
  if (!(params.threshold > 0.0 && params.threshold <= 1.0)) throw domain_error("threshold must lie in (0,1]");

  const int half = n / 2;
  LassoParams lasso = params.lasso;
  lasso.max_entries = params.q_max;

  std::vector<std::vector<int>> hits(static_cast<std::size_t>(params.n_subsamples));
  parallel_for(params.n_subsamples, n_threads, [&](int b) {
    Rng rng(derive_seed(seed, stream::stability, static_cast<std::uint64_t>(b)));
    const std::vector<int> rows = rng.sample_without_replacement(n, half);

    Eigen::MatrixXd xs(half, m);
    Eigen::VectorXd ys(half);
    for (int i = 0; i < half; ++i) {
      xs.row(i) = x_rules.values.row(rows[static_cast<std::size_t>(i)]);
      ys(i) = tau_hat(rows[static_cast<std::size_t>(i)]);
    }
    try {
      const LassoPath path = lasso_path(xs, ys, lasso);
      const int take = std::min<int>(params.q_max, static_cast<int>(path.entry_order.size()));
      hits[static_cast<std::size_t>(b)].assign(path.entry_order.begin(), path.entry_order.begin() + take);
    } catch (const Error& e) {
      if (e.kind() == "convergence error") {
        throw convergence_error("stability subsample " + std::to_string(b) + ": " + e.what());
      }
      throw;
    }
  });

  StabilitySelectionResult result;
  result.selection_probability = Eigen::VectorXd::Zero(m);
  for (const auto& h : hits) {
    for (const int j : h) result.selection_probability(j) += 1.0;
  }
  result.selection_probability /= static_cast<double>(params.n_subsamples);
  for (int j = 0; j < m; ++j) {
    if (result.selection_probability(j) >= params.threshold) result.selected.push_back(j);
  }
  result.threshold = params.threshold;
  result.n_subsamples = params.n_subsamples;
  result.q_max = params.q_max;
  return result;
}

}  // namespace cre
