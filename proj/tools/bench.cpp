// Benchmarks the parallel kernels (forest fitting, stability selection,
// sensitivity bootstrap) against their single-threaded runs and checks that
// both produce identical results, which the seeding scheme guarantees.

#include <Eigen/Dense>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "cre/dataset.hpp"
#include "cre/ensemble.hpp"
#include "cre/parallel.hpp"
#include "cre/pipeline.hpp"
#include "cre/rules.hpp"
#include "cre/sensitivity.hpp"
#include "cre/simulation.hpp"
#include "cre/stability.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct BenchRow {
  std::string name;
  double serial_s = 0;
  double parallel_s = 0;
  bool identical = false;
};

void print_row(const BenchRow& r) {
  std::printf("%-28s serial %8.3fs   %d threads %8.3fs   speedup %5.2fx   identical: %s\n", r.name.c_str(),
              r.serial_s, cre::resolve_threads(0), r.parallel_s,
              r.parallel_s > 0 ? r.serial_s / r.parallel_s : 0.0, r.identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 4000;
  cre::DgpSpec spec;
  spec.n = n;
  spec.k_effect = 1.0;
  spec.seed = 7;
  const auto [data, truth] = cre::generate(spec);
  std::printf("benchmark dataset: n=%d, k=%d, hardware threads=%d\n\n", data.n(), data.k(), cre::resolve_threads(0));

  bool all_identical = true;

  {
    cre::EnsembleParams params;
    params.seed = 11;
    Eigen::VectorXd target = data.y;  // any response works for the kernel timing
    auto t0 = Clock::now();
    const auto serial = cre::fit_random_forest(data.x, target, params, 1);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel = cre::fit_random_forest(data.x, target, params, 0);
    const double tp = seconds_since(t0);
    bool same = serial.size() == parallel.size();
    for (std::size_t i = 0; same && i < serial.size(); ++i) {
      same = serial[i].nodes.size() == parallel[i].nodes.size();
      for (std::size_t j = 0; same && j < serial[i].nodes.size(); ++j) {
        const auto& a = serial[i].nodes[j];
        const auto& b = parallel[i].nodes[j];
        same = a.feature == b.feature && a.threshold == b.threshold && a.prediction == b.prediction;
      }
    }
    all_identical = all_identical && same;
    print_row({"random forest (200 trees)", ts, tp, same});
  }

  {
    // rule design from a quick forest, then the stability selection kernel
    cre::EnsembleParams params;
    params.seed = 11;
    params.n_trees_forest = 50;
    const auto trees = cre::fit_random_forest(data.x, data.y, params, 0);
    const auto rules = cre::extract_rules(trees, data.x, data.column_names, 3, 0.02);
    const auto rm = cre::build_rule_matrix(rules, data);
    cre::StabilityParams sp;
    auto t0 = Clock::now();
    const auto serial = cre::stability_select(rm, data.y, sp, 13, 1);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel = cre::stability_select(rm, data.y, sp, 13, 0);
    const double tp = seconds_since(t0);
    const bool same = (serial.selection_probability.array() == parallel.selection_probability.array()).all() &&
                      serial.selected == parallel.selected;
    all_identical = all_identical && same;
    print_row({"stability selection (50x)", ts, tp, same});
  }

  {
    const std::vector<cre::Rule> rules = truth.true_rules;
    cre::SensitivityConfig cfg;
    cfg.lambda_values = {1.0, 1.02, 1.04};
    cfg.n_bootstrap = 200;
    cfg.seed = 17;
    auto t0 = Clock::now();
    const auto serial = cre::sensitivity_intervals(data, rules, cfg, 1);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel = cre::sensitivity_intervals(data, rules, cfg, 0);
    const double tp = seconds_since(t0);
    bool same = serial.rows.size() == parallel.rows.size();
    for (std::size_t i = 0; same && i < serial.rows.size(); ++i) {
      same = serial.rows[i].lambda_star == parallel.rows[i].lambda_star;
      for (std::size_t j = 0; same && j < serial.rows[i].cells.size(); ++j) {
        same = serial.rows[i].cells[j].lower == parallel.rows[i].cells[j].lower &&
               serial.rows[i].cells[j].upper == parallel.rows[i].cells[j].upper;
      }
    }
    all_identical = all_identical && same;
    print_row({"sensitivity (200 bootstrap)", ts, tp, same});
  }

  std::printf("\n%s\n", all_identical ? "all kernels match across thread counts"
                                      : "MISMATCH between serial and parallel runs");
  return all_identical ? 0 : 1;
}
