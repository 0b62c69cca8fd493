#include "cre/pseudo_outcome.hpp"

#include <cmath>
#include <vector>

#include "cre/csv.hpp"
#include "cre/errors.hpp"
#include "cre/rng.hpp"

namespace cre {

std::string pseudo_method_name(PseudoMethod m) {
  switch (m) {
    case PseudoMethod::IPW: return "ipw";
    case PseudoMethod::SIPW: return "sipw";
    case PseudoMethod::OR: return "or";
    case PseudoMethod::IMPUTE_DIFF: return "impute_diff";
    case PseudoMethod::EXTERNAL: return "external";
  }
  throw contract_error("unknown pseudo-outcome method");
}

PseudoMethod pseudo_method_from_name(const std::string& name) {
  if (name == "ipw") return PseudoMethod::IPW;
  if (name == "sipw") return PseudoMethod::SIPW;
  if (name == "or") return PseudoMethod::OR;
  if (name == "impute_diff") return PseudoMethod::IMPUTE_DIFF;
  if (name == "external") return PseudoMethod::EXTERNAL;
  throw usage_error("unknown pseudo-outcome method '" + name + "' (ipw, sipw, or, impute_diff, external)");
}

namespace {

void check_propensities(const Dataset& d, const Eigen::VectorXd& e_hat) {
  if (e_hat.size() != d.n()) throw contract_error("propensity vector length mismatch");
  for (int i = 0; i < e_hat.size(); ++i) {
    if (!(e_hat(i) > 0.0 && e_hat(i) < 1.0)) {
      throw domain_error("propensity " + std::to_string(e_hat(i)) + " outside (0,1) at row " + std::to_string(i + 1));
    }
  }
}

void check_finite(const Eigen::VectorXd& v, const char* what) {
  for (int i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) throw domain_error(std::string(what) + " produced a non-finite value");
  }
}

}  // namespace

PseudoOutcomes ipw_pseudo(const Dataset& d, const Eigen::VectorXd& e_hat) {
  check_propensities(d, e_hat);
  PseudoOutcomes p;
  p.method = PseudoMethod::IPW;
  p.tau_star.resize(d.n());
  for (int i = 0; i < d.n(); ++i) {
    const double w = d.z(i) == 1 ? 1.0 / e_hat(i) : -1.0 / (1.0 - e_hat(i));
    p.tau_star(i) = w * d.y(i);
  }
  check_finite(p.tau_star, "ipw_pseudo");
  return p;
}

PseudoOutcomes sipw_pseudo(const Dataset& d, const Eigen::VectorXd& e_hat) {
  check_propensities(d, e_hat);
  if (d.n_treated() == 0 || d.n_control() == 0) throw arm_error("sipw_pseudo requires both arms nonempty");
  const double n = static_cast<double>(d.n());
  double s1 = 0.0, s0 = 0.0;
  for (int i = 0; i < d.n(); ++i) {
    if (d.z(i) == 1) {
      s1 += 1.0 / e_hat(i);
    } else {
      s0 += 1.0 / (1.0 - e_hat(i));
    }
  }
  s1 /= n;
  s0 /= n;

  PseudoOutcomes p;
  p.method = PseudoMethod::SIPW;
  p.tau_star.resize(d.n());
  for (int i = 0; i < d.n(); ++i) {
    const double w = d.z(i) == 1 ? 1.0 / (s1 * e_hat(i)) : -1.0 / (s0 * (1.0 - e_hat(i)));
    p.tau_star(i) = w * d.y(i);
  }
  check_finite(p.tau_star, "sipw_pseudo");
  return p;
}

OutcomeModel fit_outcome_models(const Dataset& d, const EnsembleParams& params) {
  params.validate();
  std::vector<int> treated, control;
  for (int i = 0; i < d.n(); ++i) (d.z(i) == 1 ? treated : control).push_back(i);
  if (static_cast<long long>(treated.size()) < params.min_leaf ||
      static_cast<long long>(control.size()) < params.min_leaf) {
    throw arm_error("an arm has fewer rows than the minimum leaf size (" + std::to_string(treated.size()) + " treated, " +
                    std::to_string(control.size()) + " control, min_leaf " + std::to_string(params.min_leaf) + ")");
  }

  const Dataset d1 = d.subset(treated);
  const Dataset d0 = d.subset(control);

  OutcomeModel om;
  EnsembleParams p0 = params;
  p0.seed = derive_seed(params.seed, stream::tlearner, 0);
  om.m0 = fit_gradient_boosting(d0.x, d0.y, p0);
  EnsembleParams p1 = params;
  p1.seed = derive_seed(params.seed, stream::tlearner, 1);
  om.m1 = fit_gradient_boosting(d1.x, d1.y, p1);
  return om;
}

PseudoOutcomes or_pseudo(const Dataset& d, const OutcomeModel& om) {
  PseudoOutcomes p;
  p.method = PseudoMethod::OR;
  p.tau_star.resize(d.n());
  for (int i = 0; i < d.n(); ++i) {
    const double counterfactual =
        d.z(i) == 1 ? predict_boosting(om.m0, d.x.row(i)) : predict_boosting(om.m1, d.x.row(i));
    p.tau_star(i) = (2.0 * d.z(i) - 1.0) * (d.y(i) - counterfactual);
  }
  check_finite(p.tau_star, "or_pseudo");
  return p;
}

PseudoOutcomes impute_diff_pseudo(const Dataset& d, const OutcomeModel& om) {
  PseudoOutcomes p;
  p.method = PseudoMethod::IMPUTE_DIFF;
  p.tau_star.resize(d.n());
  for (int i = 0; i < d.n(); ++i) {
    p.tau_star(i) = predict_boosting(om.m1, d.x.row(i)) - predict_boosting(om.m0, d.x.row(i));
  }
  check_finite(p.tau_star, "impute_diff_pseudo");
  return p;
}

PseudoOutcomes load_external_pseudo(const std::string& path, const Dataset& d) {
  const CsvTable table = read_csv(path);
  if (table.n_cols != 1) {
    throw alignment_error("external pseudo-outcome file must have exactly one column, found " +
                          std::to_string(table.n_cols));
  }
  if (table.n_rows != static_cast<std::size_t>(d.n())) {
    throw alignment_error("external pseudo-outcome length " + std::to_string(table.n_rows) +
                          " does not match dataset rows " + std::to_string(d.n()));
  }
  PseudoOutcomes p;
  p.method = PseudoMethod::EXTERNAL;
  p.tau_star.resize(d.n());
  for (int i = 0; i < d.n(); ++i) p.tau_star(i) = table.at(static_cast<std::size_t>(i), 0);
  check_finite(p.tau_star, "load_external_pseudo");
  return p;
}

}  // namespace cre
