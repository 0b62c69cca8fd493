#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cre/dataset.hpp"
#include "cre/rules.hpp"

namespace cre {

enum class HcFlavor { Auto, HC0, HC3 };  // Auto: HC0 when N >= 500, HC3 below

std::string hc_flavor_name(HcFlavor f);
HcFlavor hc_flavor_from_name(const std::string& name);
HcFlavor resolve_hc_flavor(HcFlavor f, int n);

struct BetaFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
};

// Least squares via rank-revealing QR. Throws CollinearityError carrying the
// greedy earliest-first maximal independent column subset when the design is
// rank deficient.
BetaFit estimate_beta(const Eigen::MatrixXd& design, const Eigen::VectorXd& tau_star);

// HC0: (X'X)^-1 (sum v_i^2 x_i x_i') (X'X)^-1; HC3 divides v_i^2 by
// (1-h_ii)^2. Already on the sampling-variance scale of beta_hat.
Eigen::MatrixXd sandwich_vcov(const Eigen::MatrixXd& design, const Eigen::VectorXd& residuals, HcFlavor flavor);

struct InferenceResult {
  Eigen::VectorXd beta_hat;   // intercept first
  Eigen::MatrixXd vcov;
  Eigen::VectorXd residuals;
  HcFlavor hc_flavor = HcFlavor::HC0;
  double wald_stat = 0.0;
  int wald_df = 0;
  double wald_critical = 0.0;
  bool wald_reject = false;
  double alpha = 0.05;
};

// beta_hat_j +/- z_{1-alpha/2} sqrt(vcov_jj), one pair per coefficient.
std::vector<std::pair<double, double>> confidence_intervals(const InferenceResult& r, double alpha);

struct WaldTest {
  double statistic = 0.0;
  int df = 0;
  double critical = 0.0;
  bool reject = false;
};

// T = b' V^-1 b over the tested block vs the chi-square (1-alpha) quantile.
// Default excludes the intercept. df = 0 gives a vacuous no-reject result.
WaldTest wald_test(const Eigen::VectorXd& beta_hat, const Eigen::MatrixXd& vcov, double alpha,
                   bool include_intercept = false);

struct SubgroupEffect {
  double estimate = 0.0;
  double se = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// c'beta with c = (1, membership), normal interval from c' vcov c.
SubgroupEffect subgroup_effect(const InferenceResult& r, const std::vector<int>& rule_membership, double alpha);

struct InferenceOptions {
  HcFlavor flavor = HcFlavor::Auto;
  double alpha = 0.05;
  bool wald_include_intercept = false;
};

struct RuleInference {
  std::string label;  // "(intercept)" for the baseline row
  double estimate = 0.0;
  double se = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
};

struct InferenceReport {
  InferenceResult result;
  std::vector<Rule> rules;          // rules actually in the design, in order
  std::vector<DroppedRule> dropped; // constant, duplicate or collinear on the inference rows
  std::vector<RuleInference> coefficients;  // intercept first, then rules
};

// Builds [1 | rule columns] on d_inf, drops rules that collapse on these rows
// (constant/duplicate/collinear), fits OLS with the sandwich variance, and
// assembles intervals plus the Wald test. An empty rule list yields the
// intercept-only fit.
InferenceReport run_inference(const Dataset& d_inf, const std::vector<Rule>& rules, const Eigen::VectorXd& tau_star,
                              const InferenceOptions& opts = {});

}  // namespace cre
