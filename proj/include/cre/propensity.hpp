#pragma once

#include <Eigen/Dense>
#include <json.hpp>

namespace cre {

// Logistic propensity model e(x) = expit(gamma'(1,x)), probabilities clipped
// to [clip, 1-clip] at prediction time.
struct PropensityModel {
  Eigen::VectorXd gamma;  // K+1 coefficients, intercept first
  bool converged = false;
  int iterations = 0;
  double clip = 0.01;
};

// Maximum-likelihood fit by iteratively reweighted least squares with step
// halving. Converged when the max absolute coefficient change drops below tol.
PropensityModel fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXi& z, int max_iter = 100,
                             double tol = 1e-8, double clip = 0.01);

double predict_propensity(const PropensityModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x);

Eigen::VectorXd propensity_scores(const PropensityModel& m, const Eigen::MatrixXd& x);

nlohmann::json propensity_to_json(const PropensityModel& m);
PropensityModel propensity_from_json(const nlohmann::json& j);

}  // namespace cre
