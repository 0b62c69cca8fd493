#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cre/rules.hpp"

namespace cre {

struct LassoParams {
  int n_lambda = 100;
  double lambda_min_ratio = 0.001;
  double tol = 1e-7;            // max coefficient change per sweep, standardized scale
  long long max_sweeps = 100000;  // per lambda
  int max_entries = 0;          // stop extending the path once this many columns entered (0 = never)
};

// Coordinate-descent path on columns standardized to unit variance.
// coefficients[t] holds the unpenalized intercept first, then the M
// standardized-scale coefficients at lambdas[t]. Columns that are constant on
// the given rows are frozen at zero.
struct LassoPath {
  std::vector<double> lambdas;               // decreasing
  std::vector<Eigen::VectorXd> coefficients; // per lambda, length M+1
  std::vector<int> entry_order;              // columns in order of first nonzero
};

LassoPath lasso_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoParams& params = {});
LassoPath lasso_path(const RuleMatrix& x_rules, const Eigen::VectorXd& tau_hat, const LassoParams& params = {});

}  // namespace cre
