#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "cre/dataset.hpp"
#include "cre/ensemble.hpp"

namespace cre {

enum class PseudoMethod { IPW, SIPW, OR, IMPUTE_DIFF, EXTERNAL };

std::string pseudo_method_name(PseudoMethod m);
PseudoMethod pseudo_method_from_name(const std::string& name);

// Per-unit CATE proxies tau*_i, oriented treated-minus-control.
struct PseudoOutcomes {
  Eigen::VectorXd tau_star;
  PseudoMethod method = PseudoMethod::SIPW;
};

// T-learner outcome models: m0 trained on control rows, m1 on treated rows.
struct OutcomeModel {
  GradientBoosting m0;
  GradientBoosting m1;
};

// tau*_i = (z_i/e_i - (1-z_i)/(1-e_i)) * y_i
PseudoOutcomes ipw_pseudo(const Dataset& d, const Eigen::VectorXd& e_hat);

// Stabilized IPW: arm weights normalized to mean 1, so mean(tau*) is exactly
// the Hajek ATE estimator.
PseudoOutcomes sipw_pseudo(const Dataset& d, const Eigen::VectorXd& e_hat);

// Seed streams: tlearner/0 for m0, tlearner/1 for m1 (derived from params.seed).
OutcomeModel fit_outcome_models(const Dataset& d, const EnsembleParams& params);

// tau*_i = (2 z_i - 1) * (y_i - m_{1-z_i}(x_i)): observed minus imputed
// counterfactual, signed treated-minus-control.
PseudoOutcomes or_pseudo(const Dataset& d, const OutcomeModel& om);

// tau*_i = m1(x_i) - m0(x_i)
PseudoOutcomes impute_diff_pseudo(const Dataset& d, const OutcomeModel& om);

// Single-column headered CSV of length N, aligned to d's row order.
PseudoOutcomes load_external_pseudo(const std::string& path, const Dataset& d);

}  // namespace cre
