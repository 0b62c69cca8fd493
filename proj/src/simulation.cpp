#include "cre/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "cre/errors.hpp"
#include "cre/rng.hpp"

namespace cre {

void DgpSpec::validate() const {
  if (n < 100) throw domain_error("DGP requires n >= 100");
  if (n_rules != 2 && n_rules != 4) throw domain_error("n_rules must be 2 or 4");
  if (!(correlation >= 0.0 && correlation < 1.0)) throw domain_error("correlation must lie in [0,1)");
  if (!std::isfinite(k_effect)) throw domain_error("k_effect must be finite");
}

namespace {

double expit(double t) { return 1.0 / (1.0 + std::exp(-t)); }

constexpr double kPi = 3.14159265358979323846;

}  // namespace

std::pair<Dataset, SimTruth> generate(const DgpSpec& spec) {
  spec.validate();
  const int n = spec.n;
  constexpr int k = 10;
  Rng rng(derive_seed(spec.seed, stream::simulation));

  Dataset d;
  d.x.resize(n, k);
  d.y.resize(n);
  d.z.resize(n);
  for (int j = 0; j < k; ++j) d.column_names.push_back("x" + std::to_string(j + 1));

  // Dichotomized equicorrelated latent Gaussian. A latent correlation of
  // sin(pi*rho/2) yields binary correlation rho at threshold zero.
  const double latent_rho = std::sin(kPi * spec.correlation / 2.0);
  const double w_common = std::sqrt(latent_rho);
  const double w_own = std::sqrt(1.0 - latent_rho);
  for (int i = 0; i < n; ++i) {
    const double common = rng.normal();
    for (int j = 0; j < k; ++j) {
      const double g = w_common * common + w_own * rng.normal();
      d.x(i, j) = g > 0.0 ? 1.0 : 0.0;
    }
  }

  for (int i = 0; i < n; ++i) {
    const double pi_i = expit(-1.0 + d.x(i, 0) - d.x(i, 1) + d.x(i, 2));
    d.z(i) = rng.bernoulli(pi_i) ? 1 : 0;
  }

  const int a = spec.effect_modifiers == Modifiers::X123 ? 0 : 7;
  const int b = a + 1;
  const int c = a + 2;

  SimTruth truth;
  truth.tau_true.resize(n);
  for (int i = 0; i < n; ++i) {
    const double xa = d.x(i, a), xb = d.x(i, b), xc = d.x(i, c);
    double tau = 0.0;
    if (spec.n_rules == 2) {
      if (xa == 0.0 && xb == 0.0) tau = spec.k_effect;
      if (xa == 1.0 && xb == 1.0) tau = -spec.k_effect;
    } else {
      if (xa == 0.0 && xb == 0.0 && xc == 1.0) tau = spec.k_effect;
      if (xa == 0.0 && xb == 0.0 && xc == 0.0) tau = 2.0 * spec.k_effect;
      if (xa == 0.0 && xb == 1.0 && xc == 0.0) tau = -spec.k_effect;
      if (xa == 0.0 && xb == 1.0 && xc == 1.0) tau = -2.0 * spec.k_effect;
    }
    truth.tau_true(i) = tau;
  }

  truth.y0.resize(n);
  truth.y1.resize(n);
  for (int i = 0; i < n; ++i) {
    double f = d.x(i, 0) + 0.5 * d.x(i, 1) + d.x(i, 2);
    if (spec.confounding == Confounding::Nonlinear) f += std::exp(d.x(i, 0) - d.x(i, 1) * d.x(i, 2));
    truth.y0(i) = f + rng.normal();
    truth.y1(i) = truth.y0(i) + truth.tau_true(i);
    d.y(i) = d.z(i) == 1 ? truth.y1(i) : truth.y0(i);
  }

  const auto le = [](int col) { return Condition{col, Direction::LE, 0.5}; };
  const auto gt = [](int col) { return Condition{col, Direction::GT, 0.5}; };
  if (spec.n_rules == 2) {
    truth.true_rules.push_back(make_rule({le(a), le(b)}, d.column_names));
    truth.true_rules.push_back(make_rule({gt(a), gt(b)}, d.column_names));
  } else {
    truth.true_rules.push_back(make_rule({le(a), le(b), gt(c)}, d.column_names));
    truth.true_rules.push_back(make_rule({le(a), le(b), le(c)}, d.column_names));
    truth.true_rules.push_back(make_rule({le(a), gt(b), le(c)}, d.column_names));
    truth.true_rules.push_back(make_rule({le(a), gt(b), gt(c)}, d.column_names));
  }
  return {std::move(d), std::move(truth)};
}

namespace {

bool same_truth_table(const Rule& lhs, const Rule& rhs, const Eigen::MatrixXd& x) {
  for (int i = 0; i < x.rows(); ++i) {
    if (evaluate_rule(lhs, x.row(i)) != evaluate_rule(rhs, x.row(i))) return false;
  }
  return true;
}

}  // namespace

DiscoveryMetrics run_discovery_experiment(const DgpSpec& spec, int replicates, const DiscoveryExperimentConfig& cfg) {
  if (replicates < 1) throw domain_error("replicates must be positive");

  DiscoveryMetrics metrics;
  metrics.n_true_rules = spec.n_rules;
  double cdr_sum = 0.0, pi_sum = 0.0, dr_sum = 0.0;

  for (int rep = 0; rep < replicates; ++rep) {
    const std::uint64_t rep_seed = derive_seed(spec.seed, stream::simulation, static_cast<std::uint64_t>(rep));
    DgpSpec rep_spec = spec;
    rep_spec.seed = rep_seed;
    const auto [data, truth] = generate(rep_spec);

    try {
      const SplitIndices split = split_sample(data, cfg.split_ratio, rep_seed);
      const Dataset d_disc = data.subset(split.discovery);
      DiscoveryConfig dcfg = cfg.discovery;
      dcfg.n_threads = cfg.n_threads;
      const DiscoveryOutput out = run_discovery(d_disc, dcfg, rep_seed);

      int found = 0;
      for (const auto& true_rule : truth.true_rules) {
        for (const auto& sel : out.selected_rules) {
          if (same_truth_table(true_rule, sel, data.x)) {
            ++found;
            break;
          }
        }
      }
      cdr_sum += found;
      pi_sum += found == spec.n_rules ? 1.0 : 0.0;
      dr_sum += static_cast<double>(out.selected_rules.size());
      ++metrics.replicates_ok;
    } catch (const Error&) {
      ++metrics.replicates_failed;
    }
  }

  if (metrics.replicates_ok > 0) {
    metrics.cdr = cdr_sum / metrics.replicates_ok;
    metrics.pi_all = pi_sum / metrics.replicates_ok;
    metrics.dr = dr_sum / metrics.replicates_ok;
  }
  return metrics;
}

std::vector<EstimationMetrics> run_estimation_experiment(const DgpSpec& spec, const std::vector<double>& ratios,
                                                         int replicates, const EstimationExperimentConfig& cfg) {
  if (replicates < 1) throw domain_error("replicates must be positive");
  if (ratios.empty()) throw domain_error("need at least one split ratio");

  std::vector<EstimationMetrics> out(ratios.size());
  for (std::size_t t = 0; t < ratios.size(); ++t) out[t].ratio = ratios[t];

  for (int rep = 0; rep < replicates; ++rep) {
    const std::uint64_t rep_seed = derive_seed(spec.seed, stream::simulation, static_cast<std::uint64_t>(rep));
    DgpSpec rep_spec = spec;
    rep_spec.seed = rep_seed;
    const auto [data, truth] = generate(rep_spec);

    for (std::size_t t = 0; t < ratios.size(); ++t) {
      try {
        const SplitIndices split = split_sample(data, ratios[t], rep_seed);
        const Dataset d_inf = data.subset(split.inference);

        std::vector<Rule> rules;
        if (cfg.oracle_rules) {
          rules = truth.true_rules;
        } else {
          const Dataset d_disc = data.subset(split.discovery);
          DiscoveryConfig dcfg = cfg.discovery;
          dcfg.n_threads = cfg.n_threads;
          rules = run_discovery(d_disc, dcfg, rep_seed).selected_rules;
        }

        const EstimationOutput est = run_estimation(d_inf, rules, cfg.estimation, rep_seed);

        // fitted tau(x) over the full draw
        const auto& kept = est.report.rules;
        double sse = 0.0;
        for (int i = 0; i < data.n(); ++i) {
          double fit = est.report.result.beta_hat(0);
          for (std::size_t m = 0; m < kept.size(); ++m) {
            fit += est.report.result.beta_hat(static_cast<int>(m) + 1) * evaluate_rule(kept[m], data.x.row(i));
          }
          const double err = fit - truth.tau_true(i);
          sse += err * err;
        }
        out[t].mean_rmse += std::sqrt(sse / data.n());
        ++out[t].replicates_ok;
      } catch (const Error&) {
        ++out[t].replicates_failed;
      }
    }
  }
  for (auto& m : out) {
    if (m.replicates_ok > 0) m.mean_rmse /= m.replicates_ok;
  }
  return out;
}

}  // namespace cre
