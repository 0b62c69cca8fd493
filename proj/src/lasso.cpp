#include "cre/lasso.hpp"

#include <algorithm>
#include <cmath>

#include "cre/errors.hpp"

namespace cre {
namespace {

double soft_threshold(double v, double lambda) {
  if (v > lambda) return v - lambda;
  if (v < -lambda) return v + lambda;
  return 0.0;
}

}  // namespace

LassoPath lasso_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoParams& params) {
  const int n = static_cast<int>(x.rows());
  const int m = static_cast<int>(x.cols());
  if (y.size() != n) throw contract_error("lasso: target length mismatch");
  if (n < 2 || m < 1) throw domain_error("lasso needs at least 2 rows and 1 column");
  if (params.n_lambda < 1 || !(params.lambda_min_ratio > 0.0 && params.lambda_min_ratio <= 1.0)) {
    throw domain_error("lasso: bad lambda grid parameters");
  }

  const double y_mean = y.mean();
  const Eigen::VectorXd yc = y.array() - y_mean;

  // standardize to zero mean, unit (1/N) variance; constant columns stay zero
  Eigen::MatrixXd u(n, m);
  std::vector<char> usable(static_cast<std::size_t>(m), 1);
  for (int j = 0; j < m; ++j) {
    const double mu = x.col(j).mean();
    const Eigen::VectorXd centered = x.col(j).array() - mu;
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(n));
    if (sd == 0.0) {
      usable[static_cast<std::size_t>(j)] = 0;
      u.col(j).setZero();
    } else {
      u.col(j) = centered / sd;
    }
  }

  const Eigen::VectorXd c = u.transpose() * yc / static_cast<double>(n);
  double lambda_max = 0.0;
  for (int j = 0; j < m; ++j) {
    if (usable[static_cast<std::size_t>(j)]) lambda_max = std::max(lambda_max, std::abs(c(j)));
  }
  if (lambda_max == 0.0) lambda_max = 1e-12;  // constant target: nothing can enter

  // lazy Gram columns, filled the first time a coefficient moves
  std::vector<Eigen::VectorXd> gram(static_cast<std::size_t>(m));
  const auto gram_col = [&](int j) -> const Eigen::VectorXd& {
    auto& g = gram[static_cast<std::size_t>(j)];
    if (g.size() == 0) g = u.transpose() * u.col(j) / static_cast<double>(n);
    return g;
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd grad = c;
  std::vector<int> working;  // ascending column indices
  std::vector<char> in_working(static_cast<std::size_t>(m), 0);
  std::vector<char> entered(static_cast<std::size_t>(m), 0);

  LassoPath path;
  for (int t = 0; t < params.n_lambda; ++t) {
    const double lambda =
        params.n_lambda == 1
            ? lambda_max
            : lambda_max * std::pow(params.lambda_min_ratio, static_cast<double>(t) / (params.n_lambda - 1));

    long long sweeps = 0;
    while (true) {
      // converge the working set
      while (true) {
        double max_change = 0.0;
        for (const int j : working) {
          const double proposed = soft_threshold(beta(j) + grad(j), lambda);
          const double delta = proposed - beta(j);
          if (delta != 0.0) {
            grad -= delta * gram_col(j);
            beta(j) = proposed;
            max_change = std::max(max_change, std::abs(delta));
            if (proposed != 0.0 && !entered[static_cast<std::size_t>(j)]) {
              entered[static_cast<std::size_t>(j)] = 1;
              path.entry_order.push_back(j);
            }
          }
        }
        if (++sweeps > params.max_sweeps) {
          throw convergence_error("lasso exceeded " + std::to_string(params.max_sweeps) +
                                  " sweeps at lambda index " + std::to_string(t));
        }
        if (max_change < params.tol) break;
      }

      // refresh the gradient exactly and admit KKT violators
      grad = c;
      for (const int j : working) {
        if (beta(j) != 0.0) grad -= beta(j) * gram_col(j);
      }
      bool added = false;
      for (int j = 0; j < m; ++j) {
        if (!usable[static_cast<std::size_t>(j)] || in_working[static_cast<std::size_t>(j)]) continue;
        if (std::abs(grad(j)) > lambda + 1e-10 * (1.0 + lambda)) {
          working.insert(std::lower_bound(working.begin(), working.end(), j), j);
          in_working[static_cast<std::size_t>(j)] = 1;
          added = true;
        }
      }
      if (!added) break;
    }

    path.lambdas.push_back(lambda);
    Eigen::VectorXd snapshot(m + 1);
    snapshot(0) = y_mean;
    snapshot.tail(m) = beta;
    path.coefficients.push_back(std::move(snapshot));

    if (params.max_entries > 0 && static_cast<int>(path.entry_order.size()) >= params.max_entries) break;
  }
  return path;
}

LassoPath lasso_path(const RuleMatrix& x_rules, const Eigen::VectorXd& tau_hat, const LassoParams& params) {
  return lasso_path(x_rules.values, tau_hat, params);
}

}  // namespace cre
