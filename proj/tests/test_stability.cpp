#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "cre/errors.hpp"
#include "cre/pipeline.hpp"
#include "cre/rng.hpp"
#include "cre/rules.hpp"
#include "cre/simulation.hpp"
#include "cre/stability.hpp"

using namespace cre;

namespace {

RuleMatrix bare_matrix(Eigen::MatrixXd values) {
  RuleMatrix rm;
  rm.values = std::move(values);
  return rm;
}

Eigen::VectorXd rule_column(const Rule& r, const Eigen::MatrixXd& x) {
  Eigen::VectorXd v(x.rows());
  for (int i = 0; i < x.rows(); ++i) v(i) = evaluate_rule(r, x.row(i)) ? 1.0 : 0.0;
  return v;
}

}  // namespace

TEST_CASE("a noiseless strong signal column is always the first entrant") {
  Rng rng(801);
  const int n = 300;
  Eigen::MatrixXd values(n, 6);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 6; ++j) values(i, j) = rng.bernoulli(0.4) ? 1.0 : 0.0;
  }
  const Eigen::VectorXd tau_hat = 10.0 * values.col(2);
  const StabilityParams params;
  const StabilitySelectionResult res = stability_select(bare_matrix(values), tau_hat, params, 31);
  CHECK(res.selection_probability(2) == 1.0);
  CHECK(std::find(res.selected.begin(), res.selected.end(), 2) != res.selected.end());
}

TEST_CASE("selected is exactly the rules at or above the threshold") {
  Rng rng(802);
  const int n = 400;
  Eigen::MatrixXd values(n, 15);
  Eigen::VectorXd tau_hat(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 15; ++j) values(i, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    tau_hat(i) = 2.0 * values(i, 0) - values(i, 4) + rng.normal();
  }
  const StabilityParams params;
  const StabilitySelectionResult res = stability_select(bare_matrix(values), tau_hat, params, 32);
  std::vector<int> expected;
  for (int j = 0; j < 15; ++j) {
    if (res.selection_probability(j) >= params.threshold) expected.push_back(j);
  }
  CHECK(res.selected == expected);
  CHECK(res.threshold == params.threshold);
  CHECK(res.n_subsamples == params.n_subsamples);
  CHECK(res.q_max == params.q_max);
  CHECK(res.selection_probability.minCoeff() >= 0.0);
  CHECK(res.selection_probability.maxCoeff() <= 1.0);
}

TEST_CASE("pure-noise candidates stay below the selection threshold") {
  // With q entrants among m exchangeable noise columns the expected number of
  // false selections is bounded by q^2 / ((2 theta - 1) m) ~= 0.07 per
  // dataset, so nearly every replicate should select nothing.
  StabilityParams params;
  params.q_max = 4;
  int clean = 0;
  const int reps = 20;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(810 + static_cast<std::uint64_t>(rep));
    const int n = 400, m = 400;
    Eigen::MatrixXd values(n, m);
    Eigen::VectorXd tau_hat(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) values(i, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
      tau_hat(i) = rng.normal();
    }
    const StabilitySelectionResult res =
        stability_select(bare_matrix(values), tau_hat, params, 900 + static_cast<std::uint64_t>(rep));
    if (res.selected.empty()) ++clean;
  }
  CHECK(clean >= 18);
}

TEST_CASE("true-rule selection probability is non-decreasing in effect size") {
  const std::vector<double> k_grid{0.1, 0.5, 1.0, 2.0};
  std::vector<double> avg_prob(k_grid.size(), 0.0);
  const int reps = 50;
  for (std::size_t g = 0; g < k_grid.size(); ++g) {
    for (int rep = 0; rep < reps; ++rep) {
      DgpSpec spec;
      spec.n = 500;
      spec.k_effect = k_grid[g];
      spec.seed = 2000 + static_cast<std::uint64_t>(rep);  // common random numbers across k
      const auto [d, truth] = generate(spec);
      Rng rng(3000 + static_cast<std::uint64_t>(rep));

      Eigen::MatrixXd values(d.n(), 12);
      values.col(0) = rule_column(truth.true_rules[0], d.x);
      values.col(1) = rule_column(truth.true_rules[1], d.x);
      for (int j = 2; j < 12; ++j) {
        for (int i = 0; i < d.n(); ++i) values(i, j) = rng.bernoulli(0.3) ? 1.0 : 0.0;
      }
      const Eigen::VectorXd tau_hat =
          truth.tau_true + Eigen::VectorXd::NullaryExpr(d.n(), [&rng](Eigen::Index) { return rng.normal(); });
      const StabilitySelectionResult res =
          stability_select(bare_matrix(values), tau_hat, StabilityParams{}, 33);
      avg_prob[g] += 0.5 * (res.selection_probability(0) + res.selection_probability(1)) / reps;
    }
  }
  for (std::size_t g = 1; g < k_grid.size(); ++g) CHECK(avg_prob[g] >= avg_prob[g - 1] - 1e-12);
  CHECK(avg_prob.back() > 0.9);
}

TEST_CASE("column permutation relabels but does not change the selected set") {
  Rng rng(803);
  const int n = 600, m = 20;
  Eigen::MatrixXd values(n, m);
  Eigen::VectorXd tau_hat(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) values(i, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    tau_hat(i) = 3.0 * values(i, 5) - 3.0 * values(i, 11) + rng.normal();
  }
  StabilityParams params;
  params.q_max = 3;  // two signals plus one rotating noise entrant
  const StabilitySelectionResult base = stability_select(bare_matrix(values), tau_hat, params, 34);

  const std::vector<int> perm = Rng(804).permutation(m);  // perm[new] = old
  Eigen::MatrixXd shuffled(n, m);
  for (int j = 0; j < m; ++j) shuffled.col(j) = values.col(perm[static_cast<std::size_t>(j)]);
  const StabilitySelectionResult moved = stability_select(bare_matrix(shuffled), tau_hat, params, 34);

  std::set<int> base_set(base.selected.begin(), base.selected.end());
  std::set<int> unmapped;
  for (const int j : moved.selected) unmapped.insert(perm[static_cast<std::size_t>(j)]);
  CHECK(base_set == unmapped);
  CHECK(base_set == std::set<int>{5, 11});
}

TEST_CASE("stability selection is deterministic and thread-count independent") {
  Rng rng(805);
  const int n = 300, m = 25;
  Eigen::MatrixXd values(n, m);
  Eigen::VectorXd tau_hat(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) values(i, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    tau_hat(i) = values(i, 3) + rng.normal();
  }
  const StabilitySelectionResult a = stability_select(bare_matrix(values), tau_hat, StabilityParams{}, 35, 1);
  const StabilitySelectionResult b = stability_select(bare_matrix(values), tau_hat, StabilityParams{}, 35, 4);
  CHECK((a.selection_probability.array() == b.selection_probability.array()).all());
  CHECK(a.selected == b.selected);

  const StabilitySelectionResult c = stability_select(bare_matrix(values), tau_hat, StabilityParams{}, 36, 1);
  CHECK(((a.selection_probability - c.selection_probability).cwiseAbs().maxCoeff() > 0.0));
}

TEST_CASE("invalid stability inputs are rejected") {
  Eigen::MatrixXd values = Eigen::MatrixXd::Random(10, 3);
  Eigen::VectorXd tau_hat = Eigen::VectorXd::Random(10);
  StabilityParams params;
  SUBCASE("length mismatch") {
    Eigen::VectorXd off = Eigen::VectorXd::Random(9);
    CHECK_THROWS_AS((void)stability_select(bare_matrix(values), off, params, 1), Error);
  }
  SUBCASE("too few rows") {
    Eigen::MatrixXd tiny = Eigen::MatrixXd::Random(3, 3);
    Eigen::VectorXd t3 = Eigen::VectorXd::Random(3);
    CHECK_THROWS_AS((void)stability_select(bare_matrix(tiny), t3, params, 1), Error);
  }
  SUBCASE("bad threshold") {
    params.threshold = 0.0;
    CHECK_THROWS_AS((void)stability_select(bare_matrix(values), tau_hat, params, 1), Error);
  }
  SUBCASE("bad q_max") {
    params.q_max = 0;
    CHECK_THROWS_AS((void)stability_select(bare_matrix(values), tau_hat, params, 1), Error);
  }
}

TEST_CASE("convergence failures name the subsample") {
  Rng rng(806);
  const int n = 100;
  Eigen::MatrixXd values(n, 4);
  Eigen::VectorXd tau_hat(n);
  for (int i = 0; i < n; ++i) {
    const double shared = rng.normal();
    for (int j = 0; j < 4; ++j) values(i, j) = shared + 0.2 * rng.normal();
    tau_hat(i) = values(i, 0) + rng.normal();
  }
  StabilityParams params;
  params.lasso.max_sweeps = 1;
  try {
    (void)stability_select(bare_matrix(values), tau_hat, params, 37);
    FAIL("expected convergence error");
  } catch (const Error& e) {
    CHECK(e.kind() == "convergence error");
    CHECK(std::string(e.what()).find("stability subsample") != std::string::npos);
  }
}

TEST_CASE("end-to-end discovery finds both true rules on a favorable draw") {
  DgpSpec spec;
  spec.n = 2000;
  spec.k_effect = 1.0;
  spec.seed = 807;
  const auto [d, truth] = generate(spec);
  const DiscoveryOutput out = run_discovery(d, DiscoveryConfig{}, 808);
  REQUIRE(!out.selected_rules.empty());

  int found = 0;
  for (const Rule& truth_rule : truth.true_rules) {
    const Eigen::VectorXd want = rule_column(truth_rule, d.x);
    for (const Rule& got : out.selected_rules) {
      if ((rule_column(got, d.x).array() == want.array()).all()) {
        ++found;
        break;
      }
    }
  }
  CHECK(found == 2);
}
