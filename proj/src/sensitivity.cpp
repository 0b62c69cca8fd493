#include "cre/sensitivity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "cre/errors.hpp"
#include "cre/parallel.hpp"
#include "cre/propensity.hpp"
#include "cre/rng.hpp"
#include "cre/stats.hpp"

namespace cre {
namespace {

void check_fraction_inputs(const std::vector<double>& y_tilde, const std::vector<double>& a, double lambda) {
  if (y_tilde.empty()) throw size_error("extremization needs at least one unit");
  if (a.size() != y_tilde.size()) throw contract_error("y_tilde and a must have equal length");
  if (!(lambda >= 1.0)) throw domain_error("lambda must be >= 1");
  for (const double v : a) {
    if (!(v > 0.0)) throw domain_error("a values must be positive");
  }
}

}  // namespace

double extremize_fraction(const std::vector<double>& y_tilde, const std::vector<double>& a, double lambda,
                          Extremum want) {
  check_fraction_inputs(y_tilde, a, lambda);
  const std::size_t n = y_tilde.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (y_tilde[i] > y_tilde[i - 1]) throw contract_error("y_tilde must be sorted descending");
  }

  // prefix sums over the sorted order
  double ay_total = 0.0, a_total = 0.0, y_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ay_total += a[i] * y_tilde[i];
    a_total += a[i];
    y_total += y_tilde[i];
  }

  // Min: the top-b prefix gets q=1/lambda, the rest lambda; Max reversed.
  const double q_top = want == Extremum::Min ? 1.0 / lambda : lambda;
  const double q_rest = want == Extremum::Min ? lambda : 1.0 / lambda;

  double best = 0.0;
  double ay_prefix = 0.0, a_prefix = 0.0;
  for (std::size_t b = 0; b <= n; ++b) {
    if (b > 0) {
      ay_prefix += a[b - 1] * y_tilde[b - 1];
      a_prefix += a[b - 1];
    }
    const double num = y_total + q_top * ay_prefix + q_rest * (ay_total - ay_prefix);
    const double den = static_cast<double>(n) + q_top * a_prefix + q_rest * (a_total - a_prefix);
    const double value = num / den;
    if (b == 0 || (want == Extremum::Min ? value < best : value > best)) best = value;
  }
  return best;
}

double vertex_oracle(const std::vector<double>& y_tilde, const std::vector<double>& a, double lambda, Extremum want) {
  if (y_tilde.empty() || y_tilde.size() > 20) {
    throw size_error("vertex_oracle handles 1..20 units, got " + std::to_string(y_tilde.size()));
  }
  check_fraction_inputs(y_tilde, a, lambda);
  const std::size_t n = y_tilde.size();

  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double q = (mask >> i) & 1 ? lambda : 1.0 / lambda;
      const double w = 1.0 + q * a[i];
      num += y_tilde[i] * w;
      den += w;
    }
    const double value = num / den;
    if (mask == 0 || (want == Extremum::Min ? value < best : value > best)) best = value;
  }
  return best;
}

namespace {

// One arm's contribution, sorted descending by y_tilde with paired a.
struct ArmPart {
  std::vector<double> y_tilde;
  std::vector<double> a;
};

ArmPart make_part(const std::vector<double>& y_tilde, const std::vector<double>& a) {
  std::vector<std::size_t> order(y_tilde.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) {
    return y_tilde[p] > y_tilde[q] || (y_tilde[p] == y_tilde[q] && p < q);
  });
  ArmPart part;
  part.y_tilde.reserve(order.size());
  part.a.reserve(order.size());
  for (const std::size_t i : order) {
    part.y_tilde.push_back(y_tilde[i]);
    part.a.push_back(a[i]);
  }
  return part;
}

}  // namespace

SensitivityResult sensitivity_intervals(const Dataset& d_inference, const std::vector<Rule>& rules,
                                        const SensitivityConfig& config, int n_threads) {
  const int n = d_inference.n();
  const int p = static_cast<int>(rules.size()) + 1;
  if (n < 2) throw domain_error("sensitivity analysis needs at least 2 rows");
  if (config.lambda_values.empty()) throw domain_error("lambda grid is empty");
  for (const double lam : config.lambda_values) {
    if (!(lam >= 1.0)) throw domain_error("every lambda must be >= 1");
  }
  if (config.n_bootstrap < 1) throw domain_error("n_bootstrap must be positive");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw domain_error("alpha must lie in (0,1)");

  std::vector<double> lambdas = config.lambda_values;
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  const int n_lambda = static_cast<int>(lambdas.size());

  // per bootstrap: [row * n_lambda] lower and upper extrema
  const int cells = p * n_lambda;
  Eigen::MatrixXd lower_draws(config.n_bootstrap, cells);
  Eigen::MatrixXd upper_draws(config.n_bootstrap, cells);

  parallel_for(config.n_bootstrap, n_threads, [&](int ell) {
    std::string last_failure;
    for (int attempt = 0;; ++attempt) {
      if (attempt > config.max_redraws) {
        throw convergence_error("sensitivity bootstrap " + std::to_string(ell) + " failed after " +
                                std::to_string(config.max_redraws) + " redraws; last: " + last_failure);
      }
      Rng rng(derive_seed(config.seed, stream::sensitivity, static_cast<std::uint64_t>(ell),
                          static_cast<std::uint64_t>(attempt)));
      const std::vector<int> draw = rng.sample_with_replacement(n, n);
      const Dataset db = d_inference.subset(draw);
      if (db.n_treated() == 0 || db.n_control() == 0) {
        last_failure = "empty arm";
        continue;
      }

      Eigen::MatrixXd design(n, p);
      design.col(0).setOnes();
      for (int m = 0; m + 1 < p; ++m) {
        for (int i = 0; i < n; ++i) design(i, m + 1) = evaluate_rule(rules[static_cast<std::size_t>(m)], db.x.row(i));
      }
      const Eigen::MatrixXd xtx = design.transpose() * design;
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
      if (!lu.isInvertible()) {
        last_failure = "rank-deficient rule design";
        continue;
      }

      PropensityModel gamma_hat;
      try {
        gamma_hat = fit_logistic(db.x, db.z, 100, 1e-8, config.clip);
      } catch (const Error& e) {
        if (e.kind() == "separation error" || e.kind() == "rank error" || e.kind() == "arm error") {
          last_failure = e.what();
          continue;
        }
        throw;
      }

      const Eigen::MatrixXd w = lu.solve(design.transpose());  // p x n
      const Eigen::VectorXd eta =
          (db.x * gamma_hat.gamma.tail(gamma_hat.gamma.size() - 1)).array() + gamma_hat.gamma(0);

      std::vector<double> yt_t, a_t, yt_c, a_c;
      for (int j = 0; j < p; ++j) {
        yt_t.clear();
        a_t.clear();
        yt_c.clear();
        a_c.clear();
        for (int i = 0; i < n; ++i) {
          const double y_tilde = w(j, i) * db.y(i);
          if (db.z(i) == 1) {
            yt_t.push_back(y_tilde);
            a_t.push_back(std::exp(-eta(i)));
          } else {
            yt_c.push_back(y_tilde);
            a_c.push_back(std::exp(eta(i)));
          }
        }
        const ArmPart treated = make_part(yt_t, a_t);
        const ArmPart control = make_part(yt_c, a_c);
        for (int t = 0; t < n_lambda; ++t) {
          const double lam = lambdas[static_cast<std::size_t>(t)];
          const double tmin = extremize_fraction(treated.y_tilde, treated.a, lam, Extremum::Min);
          const double tmax = extremize_fraction(treated.y_tilde, treated.a, lam, Extremum::Max);
          const double cmin = extremize_fraction(control.y_tilde, control.a, lam, Extremum::Min);
          const double cmax = extremize_fraction(control.y_tilde, control.a, lam, Extremum::Max);
          // fractions live on the beta/N scale (see the SIPW identity)
          lower_draws(ell, j * n_lambda + t) = static_cast<double>(n) * (tmin - cmax);
          upper_draws(ell, j * n_lambda + t) = static_cast<double>(n) * (tmax - cmin);
        }
      }
      break;
    }
  });

  SensitivityResult result;
  result.lambda_values = lambdas;
  result.n_bootstrap = config.n_bootstrap;
  result.alpha = config.alpha;
  result.seed = config.seed;
  if (config.keep_bootstrap) {
    result.bootstrap_extrema.assign(
        static_cast<std::size_t>(p),
        std::vector<std::vector<std::pair<double, double>>>(static_cast<std::size_t>(n_lambda)));
  }

  std::vector<double> lo(static_cast<std::size_t>(config.n_bootstrap));
  std::vector<double> hi(static_cast<std::size_t>(config.n_bootstrap));
  for (int j = 0; j < p; ++j) {
    SensitivityRow row;
    row.label = j == 0 ? "(intercept)" : rules[static_cast<std::size_t>(j - 1)].label;
    for (int t = 0; t < n_lambda; ++t) {
      for (int ell = 0; ell < config.n_bootstrap; ++ell) {
        lo[static_cast<std::size_t>(ell)] = lower_draws(ell, j * n_lambda + t);
        hi[static_cast<std::size_t>(ell)] = upper_draws(ell, j * n_lambda + t);
        if (config.keep_bootstrap) {
          result.bootstrap_extrema[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)].emplace_back(
              lo[static_cast<std::size_t>(ell)], hi[static_cast<std::size_t>(ell)]);
        }
      }
      SensitivityCell cell;
      cell.lambda = lambdas[static_cast<std::size_t>(t)];
      cell.lower = stats::quantile(lo, config.alpha / 2.0);
      cell.upper = stats::quantile(hi, 1.0 - config.alpha / 2.0);
      if (cell.lower <= 0.0 && 0.0 <= cell.upper && !(row.lambda_star < cell.lambda)) {
        row.lambda_star = cell.lambda;
      }
      row.cells.push_back(cell);
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace cre
