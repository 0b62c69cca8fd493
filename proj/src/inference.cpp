#include "cre/inference.hpp"

#include <cmath>

#include "cre/errors.hpp"
#include "cre/stats.hpp"

namespace cre {

std::string hc_flavor_name(HcFlavor f) {
  switch (f) {
    case HcFlavor::Auto: return "auto";
    case HcFlavor::HC0: return "HC0";
    case HcFlavor::HC3: return "HC3";
  }
  throw contract_error("unknown HC flavor");
}

HcFlavor hc_flavor_from_name(const std::string& name) {
  if (name == "auto") return HcFlavor::Auto;
  if (name == "HC0" || name == "hc0") return HcFlavor::HC0;
  if (name == "HC3" || name == "hc3") return HcFlavor::HC3;
  throw usage_error("unknown HC flavor '" + name + "' (expected auto, HC0, or HC3)");
}

HcFlavor resolve_hc_flavor(HcFlavor f, int n) {
  if (f != HcFlavor::Auto) return f;
  return n >= 500 ? HcFlavor::HC0 : HcFlavor::HC3;
}

namespace {

// Earliest-first maximal independent column subset by modified Gram-Schmidt
// with reorthogonalization.
std::vector<int> greedy_independent_columns(const Eigen::MatrixXd& design) {
  const int n = static_cast<int>(design.rows());
  const int p = static_cast<int>(design.cols());
  Eigen::MatrixXd q(n, p);
  std::vector<int> kept;
  for (int j = 0; j < p; ++j) {
    Eigen::VectorXd v = design.col(j);
    const double norm0 = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t r = 0; r < kept.size(); ++r) {
        v -= q.col(static_cast<int>(r)).dot(v) * q.col(static_cast<int>(r));
      }
    }
    if (norm0 == 0.0 || v.norm() <= 1e-8 * norm0) continue;
    q.col(static_cast<int>(kept.size())) = v / v.norm();
    kept.push_back(j);
  }
  return kept;
}

}  // namespace

BetaFit estimate_beta(const Eigen::MatrixXd& design, const Eigen::VectorXd& tau_star) {
  const int n = static_cast<int>(design.rows());
  const int p = static_cast<int>(design.cols());
  if (tau_star.size() != n) throw contract_error("estimate_beta: target length mismatch");
  if (n < p) throw rank_error("estimate_beta: fewer rows than columns");

  const std::vector<int> independent = greedy_independent_columns(design);
  if (static_cast<int>(independent.size()) < p) {
    throw CollinearityError("design is rank deficient (" + std::to_string(independent.size()) + " of " +
                                std::to_string(p) + " columns independent)",
                            independent);
  }

  BetaFit fit;
  fit.beta = design.colPivHouseholderQr().solve(tau_star);
  fit.fitted = design * fit.beta;
  fit.residuals = tau_star - fit.fitted;
  return fit;
}

Eigen::MatrixXd sandwich_vcov(const Eigen::MatrixXd& design, const Eigen::VectorXd& residuals, HcFlavor flavor) {
  const int n = static_cast<int>(design.rows());
  if (residuals.size() != n) throw contract_error("sandwich_vcov: residual length mismatch");
  flavor = resolve_hc_flavor(flavor, n);

  const Eigen::MatrixXd xtx = design.transpose() * design;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
  if (!lu.isInvertible()) throw rank_error("sandwich_vcov: singular X'X");
  const Eigen::MatrixXd bread = lu.inverse();

  Eigen::VectorXd w(n);
  if (flavor == HcFlavor::HC0) {
    w = residuals.array().square();
  } else {
    for (int i = 0; i < n; ++i) {
      const double h = design.row(i) * bread * design.row(i).transpose();
      const double one_minus_h = 1.0 - h;
      if (one_minus_h < 1e-8) {
        throw leverage_error("HC3 undefined: leverage 1 at row " + std::to_string(i + 1));
      }
      w(i) = residuals(i) * residuals(i) / (one_minus_h * one_minus_h);
    }
  }
  const Eigen::MatrixXd meat = design.transpose() * w.asDiagonal() * design;
  Eigen::MatrixXd vcov = bread * meat * bread;
  vcov = 0.5 * (vcov + vcov.transpose());  // enforce exact symmetry
  return vcov;
}

std::vector<std::pair<double, double>> confidence_intervals(const InferenceResult& r, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("alpha must lie in (0,1)");
  const double z = stats::normal_quantile(1.0 - alpha / 2.0);
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(r.beta_hat.size()));
  for (int j = 0; j < r.beta_hat.size(); ++j) {
    const double se = std::sqrt(std::max(0.0, r.vcov(j, j)));
    out.emplace_back(r.beta_hat(j) - z * se, r.beta_hat(j) + z * se);
  }
  return out;
}

WaldTest wald_test(const Eigen::VectorXd& beta_hat, const Eigen::MatrixXd& vcov, double alpha,
                   bool include_intercept) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("alpha must lie in (0,1)");
  const int p = static_cast<int>(beta_hat.size());
  const int start = include_intercept ? 0 : 1;
  const int df = p - start;

  WaldTest t;
  t.df = df;
  if (df == 0) return t;  // nothing to test

  const Eigen::VectorXd b = beta_hat.segment(start, df);
  const Eigen::MatrixXd v = vcov.block(start, start, df, df);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
  if (!lu.isInvertible()) throw singularity_error("wald_test: singular variance block");
  t.statistic = b.dot(lu.solve(b));
  t.critical = stats::chi_square_quantile(1.0 - alpha, df);
  t.reject = t.statistic > t.critical;
  return t;
}

SubgroupEffect subgroup_effect(const InferenceResult& r, const std::vector<int>& rule_membership, double alpha) {
  const int p = static_cast<int>(r.beta_hat.size());
  if (static_cast<int>(rule_membership.size()) != p - 1) {
    throw contract_error("membership length must equal the number of rules");
  }
  Eigen::VectorXd c(p);
  c(0) = 1.0;
  for (int j = 1; j < p; ++j) {
    const int flag = rule_membership[static_cast<std::size_t>(j - 1)];
    if (flag != 0 && flag != 1) throw domain_error("membership flags must be 0 or 1");
    c(j) = static_cast<double>(flag);
  }
  SubgroupEffect e;
  e.estimate = c.dot(r.beta_hat);
  e.se = std::sqrt(std::max(0.0, c.dot(r.vcov * c)));
  const double z = stats::normal_quantile(1.0 - alpha / 2.0);
  e.lower = e.estimate - z * e.se;
  e.upper = e.estimate + z * e.se;
  return e;
}

InferenceReport run_inference(const Dataset& d_inf, const std::vector<Rule>& rules, const Eigen::VectorXd& tau_star,
                              const InferenceOptions& opts) {
  const int n = d_inf.n();
  if (tau_star.size() != n) throw contract_error("run_inference: pseudo-outcome length mismatch");

  InferenceReport report;
  std::vector<Rule> active = rules;

  // drop rules that collapse on the inference rows
  if (!active.empty()) {
    try {
      RuleMatrix rm = build_rule_matrix(active, d_inf);
      report.dropped = rm.dropped;
      active = rm.rules;
    } catch (const Error& e) {
      if (e.kind() != "selection-input error") throw;
      for (const auto& r : active) report.dropped.push_back({r.label, "constant or duplicate on inference rows"});
      active.clear();
    }
  }

  // retry until the design is full rank, dropping collinear rules greedily
  Eigen::MatrixXd design;
  BetaFit fit;
  while (true) {
    design.resize(n, static_cast<int>(active.size()) + 1);
    design.col(0).setOnes();
    for (std::size_t m = 0; m < active.size(); ++m) {
      for (int i = 0; i < n; ++i) design(i, static_cast<int>(m) + 1) = evaluate_rule(active[m], d_inf.x.row(i));
    }
    try {
      fit = estimate_beta(design, tau_star);
      break;
    } catch (const CollinearityError& e) {
      std::vector<char> keep(active.size() + 1, 0);
      for (const int j : e.independent_columns()) keep[static_cast<std::size_t>(j)] = 1;
      std::vector<Rule> survivors;
      for (std::size_t m = 0; m < active.size(); ++m) {
        if (keep[m + 1]) {
          survivors.push_back(active[m]);
        } else {
          report.dropped.push_back({active[m].label, "collinear on inference rows"});
        }
      }
      if (survivors.size() == active.size()) throw;  // no progress; re-raise
      active = std::move(survivors);
    }
  }

  InferenceResult res;
  res.beta_hat = fit.beta;
  res.residuals = fit.residuals;
  res.hc_flavor = resolve_hc_flavor(opts.flavor, n);
  res.vcov = sandwich_vcov(design, fit.residuals, res.hc_flavor);
  res.alpha = opts.alpha;

  const WaldTest wald = wald_test(res.beta_hat, res.vcov, opts.alpha, opts.wald_include_intercept);
  res.wald_stat = wald.statistic;
  res.wald_df = wald.df;
  res.wald_critical = wald.critical;
  res.wald_reject = wald.reject;

  const auto cis = confidence_intervals(res, opts.alpha);
  for (int j = 0; j < res.beta_hat.size(); ++j) {
    RuleInference row;
    row.label = j == 0 ? "(intercept)" : active[static_cast<std::size_t>(j - 1)].label;
    row.estimate = res.beta_hat(j);
    row.se = std::sqrt(std::max(0.0, res.vcov(j, j)));
    row.ci_lower = cis[static_cast<std::size_t>(j)].first;
    row.ci_upper = cis[static_cast<std::size_t>(j)].second;
    report.coefficients.push_back(std::move(row));
  }
  report.result = std::move(res);
  report.rules = std::move(active);
  return report;
}

}  // namespace cre
