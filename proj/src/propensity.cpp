#include "cre/propensity.hpp"

#include <algorithm>
#include <cmath>

#include "cre/errors.hpp"

namespace cre {
namespace {

double expit(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double log_likelihood(const Eigen::MatrixXd& design, const Eigen::VectorXd& zd, const Eigen::VectorXd& coef) {
  const Eigen::VectorXd eta = design * coef;
  double ll = 0.0;
  for (int i = 0; i < eta.size(); ++i) {
    // log(1+e^eta) computed stably for large |eta|
    const double e = eta(i);
    const double log1pexp = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    ll += zd(i) * e - log1pexp;
  }
  return ll;
}

}  // namespace

PropensityModel fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXi& z, int max_iter, double tol,
                             double clip) {
  const int n = static_cast<int>(x.rows());
  const int k = static_cast<int>(x.cols());
  if (z.size() != n) throw contract_error("treatment length does not match covariate rows");
  if (!(clip > 0.0 && clip < 0.5)) throw domain_error("clip must lie in (0, 0.5)");
  const int n1 = z.sum();
  if (n1 == 0 || n1 == n) throw arm_error("logistic fit requires both treated and control units");

  Eigen::MatrixXd design(n, k + 1);
  design.col(0).setOnes();
  design.rightCols(k) = x;
  const Eigen::VectorXd zd = z.cast<double>();

  Eigen::VectorXd coef = Eigen::VectorXd::Zero(k + 1);
  double ll = log_likelihood(design, zd, coef);

  PropensityModel model;
  model.clip = clip;
  for (int iter = 1; iter <= max_iter; ++iter) {
    const Eigen::VectorXd eta = design * coef;
    Eigen::VectorXd p(n), w(n);
    for (int i = 0; i < n; ++i) {
      p(i) = expit(eta(i));
      w(i) = p(i) * (1.0 - p(i));
    }
    const Eigen::MatrixXd hessian = design.transpose() * w.asDiagonal() * design;
    const Eigen::VectorXd score = design.transpose() * (zd - p);

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(hessian);
    if (!lu.isInvertible()) throw rank_error("singular weighted normal equations in logistic fit");
    const Eigen::VectorXd step = lu.solve(score);

    double scale = 1.0;
    Eigen::VectorXd next = coef + step;
    double next_ll = log_likelihood(design, zd, next);
    for (int h = 0; h < 10 && next_ll < ll; ++h) {
      scale *= 0.5;
      next = coef + scale * step;
      next_ll = log_likelihood(design, zd, next);
    }

    const double max_change = (next - coef).cwiseAbs().maxCoeff();
    coef = next;
    ll = next_ll;
    model.iterations = iter;
    if (coef.cwiseAbs().maxCoeff() > 30.0) {
      throw separation_error(
          "logistic coefficients diverged (|coef| > 30); data may be perfectly separated — "
          "review covariates or rely on probability clipping");
    }
    if (max_change < tol) {
      model.converged = true;
      break;
    }
  }
  model.gamma = coef;
  return model;
}

double predict_propensity(const PropensityModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (x.size() + 1 != m.gamma.size()) throw contract_error("covariate row length does not match model");
  const double eta = m.gamma(0) + x.dot(m.gamma.tail(m.gamma.size() - 1));
  return std::clamp(expit(eta), m.clip, 1.0 - m.clip);
}

Eigen::VectorXd propensity_scores(const PropensityModel& m, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  for (int i = 0; i < x.rows(); ++i) out(i) = predict_propensity(m, x.row(i));
  return out;
}

nlohmann::json propensity_to_json(const PropensityModel& m) {
  return {{"gamma", std::vector<double>(m.gamma.data(), m.gamma.data() + m.gamma.size())},
          {"clip", m.clip},
          {"converged", m.converged},
          {"iterations", m.iterations}};
}

PropensityModel propensity_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("gamma") || !j["gamma"].is_array()) {
    throw schema_error("propensity JSON must contain a 'gamma' array");
  }
  PropensityModel m;
  const auto g = j["gamma"].get<std::vector<double>>();
  m.gamma = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<int>(g.size()));
  m.clip = j.value("clip", 0.01);
  if (!(m.clip > 0.0 && m.clip < 0.5)) throw schema_error("propensity clip must lie in (0, 0.5)");
  m.converged = j.value("converged", true);
  m.iterations = j.value("iterations", 0);
  return m;
}

}  // namespace cre
