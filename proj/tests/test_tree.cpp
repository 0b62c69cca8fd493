#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "cre/errors.hpp"
#include "cre/rng.hpp"
#include "cre/simulation.hpp"
#include "cre/tree.hpp"

using namespace cre;

TEST_CASE("separable indicator target yields one midpoint split") {
  const int n = 40;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd target(n);
  Rng rng(501);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = i < n / 2 ? 0.0 : 1.0;
    x(i, 1) = rng.normal();  // distractor
    target(i) = x(i, 0) > 0.5 ? 1.0 : 0.0;
  }
  const Tree t = fit_regression_tree(x, target, 1, 20);
  REQUIRE(t.nodes.size() == 3);
  CHECK(t.nodes[0].feature == 0);
  CHECK(t.nodes[0].threshold == doctest::Approx(0.5));
  CHECK(t.nodes[0].n_samples == n);
  const int left = t.nodes[0].left;
  const int right = t.nodes[0].right;
  CHECK(t.nodes[static_cast<std::size_t>(left)].prediction == 0.0);
  CHECK(t.nodes[static_cast<std::size_t>(right)].prediction == 1.0);
  CHECK(t.nodes[static_cast<std::size_t>(left)].n_samples == n / 2);
}

TEST_CASE("constant target yields a root-only tree") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(100, 3);
  const Eigen::VectorXd target = Eigen::VectorXd::Constant(100, 5.0);
  const Tree t = fit_regression_tree(x, target, 3, 5);
  REQUIRE(t.nodes.size() == 1);
  CHECK(t.nodes[0].is_leaf());
  CHECK(t.nodes[0].prediction == doctest::Approx(5.0));
}

TEST_CASE("sample smaller than 2*min_leaf is an unsplit root") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(30, 2);
  Eigen::VectorXd target = x.col(0);
  const Tree t = fit_regression_tree(x, target, 3, 20);
  REQUIRE(t.nodes.size() == 1);
  CHECK(t.nodes[0].prediction == doctest::Approx(target.mean()));
}

TEST_CASE("threshold is the midpoint of adjacent observed values") {
  Eigen::MatrixXd x(40, 1);
  Eigen::VectorXd target(40);
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = i < 20 ? 1.0 : 10.0;
    target(i) = i < 20 ? 0.0 : 9.0;
  }
  const Tree t = fit_regression_tree(x, target, 1, 1);
  REQUIRE(t.nodes.size() == 3);
  CHECK(t.nodes[0].threshold == doctest::Approx(5.5));
}

TEST_CASE("two-rule oracle target is recovered exactly by a depth-2 tree") {
  DgpSpec spec;
  spec.n = 1200;
  spec.k_effect = 2.0;
  spec.seed = 502;
  const auto [d, truth] = generate(spec);
  const Tree t = fit_regression_tree(d.x, truth.tau_true, 2, 20);
  for (int i = 0; i < d.n(); ++i) {
    CHECK(t.predict(d.x.row(i)) == truth.tau_true(i));
  }
  // leaf predictions are exactly {k, -k, 0}
  for (const TreeNode& node : t.nodes) {
    if (!node.is_leaf()) continue;
    const bool known = node.prediction == 2.0 || node.prediction == -2.0 || node.prediction == 0.0;
    CHECK(known);
  }
}

TEST_CASE("leaf means aggregate back to the target total") {
  Rng rng(503);
  const int n = 500;
  Eigen::MatrixXd x(n, 4);
  Eigen::VectorXd target(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 4; ++j) x(i, j) = rng.normal();
    target(i) = std::sin(x(i, 0)) + 0.3 * x(i, 1) + 0.1 * rng.normal();
  }
  const Tree t = fit_regression_tree(x, target, 3, 20);
  double total = 0.0;
  long long count = 0;
  for (const TreeNode& node : t.nodes) {
    if (!node.is_leaf()) continue;
    total += static_cast<double>(node.n_samples) * node.prediction;
    count += node.n_samples;
  }
  CHECK(count == n);
  CHECK(total == doctest::Approx(target.sum()).epsilon(1e-10));
}

TEST_CASE("predict agrees with a manual root-to-leaf walk on every training row") {
  Rng rng(504);
  const int n = 200;
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd target(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    target(i) = x(i, 0) * x(i, 1) + rng.normal();
  }
  const Tree t = fit_regression_tree(x, target, 3, 10);
  for (int i = 0; i < n; ++i) {
    int id = 0;
    while (!t.nodes[static_cast<std::size_t>(id)].is_leaf()) {
      const TreeNode& node = t.nodes[static_cast<std::size_t>(id)];
      id = x(i, node.feature) <= node.threshold ? node.left : node.right;
    }
    CHECK(t.predict(x.row(i)) == t.nodes[static_cast<std::size_t>(id)].prediction);
  }
}

TEST_CASE("impurity ties break to the lowest feature index then lowest threshold") {
  SUBCASE("duplicate columns pick the lower index") {
    Eigen::MatrixXd x(40, 2);
    Eigen::VectorXd target(40);
    for (int i = 0; i < 40; ++i) {
      const double v = i < 20 ? 0.0 : 1.0;
      x(i, 0) = v;
      x(i, 1) = v;
      target(i) = v * 3.0;
    }
    const Tree t = fit_regression_tree(x, target, 1, 1);
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[0].feature == 0);
  }

  SUBCASE("symmetric gains pick the lower threshold") {
    Eigen::MatrixXd x(4, 1);
    x << 1.0, 2.0, 3.0, 4.0;
    Eigen::VectorXd target(4);
    target << 0.0, 5.0, 5.0, 10.0;  // splits at 1.5 and 3.5 tie; 2.5 is worse
    const Tree t = fit_regression_tree(x, target, 1, 1);
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[0].threshold == doctest::Approx(1.5));
  }
}

TEST_CASE("fit_tree honors row multiplicities") {
  // weighting a row is the same as repeating it
  Eigen::MatrixXd x(4, 1);
  x << 0.0, 1.0, 2.0, 3.0;
  Eigen::VectorXd target(4);
  target << 0.0, 0.0, 6.0, 6.0;
  const std::vector<long long> counts{3, 1, 1, 3};
  TreeFitConfig cfg;
  cfg.max_depth = 1;
  cfg.min_leaf = 1;
  const Tree weighted = fit_tree(x, target, counts, cfg, presort_columns(x), nullptr);

  Eigen::MatrixXd xr(8, 1);
  Eigen::VectorXd tr(8);
  int at = 0;
  for (int i = 0; i < 4; ++i) {
    for (long long c = 0; c < counts[static_cast<std::size_t>(i)]; ++c) {
      xr(at, 0) = x(i, 0);
      tr(at) = target(i);
      ++at;
    }
  }
  const Tree repeated = fit_regression_tree(xr, tr, 1, 1);
  REQUIRE(weighted.nodes.size() == repeated.nodes.size());
  CHECK(weighted.nodes[0].feature == repeated.nodes[0].feature);
  CHECK(weighted.nodes[0].threshold == doctest::Approx(repeated.nodes[0].threshold));
  CHECK(weighted.nodes[0].n_samples == 8);
  CHECK(weighted.nodes[1].prediction == doctest::Approx(repeated.nodes[1].prediction));
  CHECK(weighted.nodes[2].prediction == doctest::Approx(repeated.nodes[2].prediction));
}

TEST_CASE("contract violations are rejected") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(10, 2);
  Eigen::VectorXd target = Eigen::VectorXd::Random(10);
  TreeFitConfig cfg;
  CHECK_THROWS_AS((void)fit_tree(x, target, std::vector<long long>(9, 1), cfg, presort_columns(x), nullptr), Error);
  CHECK_THROWS_AS((void)fit_tree(x, target, std::vector<long long>(10, 0), cfg, presort_columns(x), nullptr), Error);
  std::vector<long long> neg(10, 1);
  neg[3] = -1;
  CHECK_THROWS_AS((void)fit_tree(x, target, neg, cfg, presort_columns(x), nullptr), Error);
}
