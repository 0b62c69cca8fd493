#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cre/dataset.hpp"
#include "cre/rules.hpp"

namespace cre {

enum class Extremum { Min, Max };

// Extremum of sum(y_i (1 + q_i a_i)) / sum(1 + q_i a_i) over q in
// [1/lambda, lambda]^n. y_tilde must be sorted descending with a in the same
// order; the optimum lies on one of the n+1 threshold configurations
// (q = 1/lambda on a top prefix and lambda below for Min, reversed for Max),
// scanned with prefix sums in O(n).
double extremize_fraction(const std::vector<double>& y_tilde, const std::vector<double>& a, double lambda,
                          Extremum want);

// Exact extremum by enumerating all 2^n corners of the box. Test oracle;
// n must lie in [1, 20].
double vertex_oracle(const std::vector<double>& y_tilde, const std::vector<double>& a, double lambda, Extremum want);

struct SensitivityConfig {
  std::vector<double> lambda_values;  // each >= 1; sorted/deduplicated internally
  int n_bootstrap = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  double clip = 0.01;      // clip for the per-bootstrap logistic refit
  int max_redraws = 10;    // per bootstrap: empty arm, rank deficiency, separation
  bool keep_bootstrap = false;
};

struct SensitivityCell {
  double lambda = 1.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct SensitivityRow {
  std::string label;  // "(intercept)" or a rule label
  std::vector<SensitivityCell> cells;  // one per grid lambda, ascending
  // smallest grid lambda whose interval covers 0; +inf when none does
  double lambda_star = std::numeric_limits<double>::infinity();
};

struct SensitivityResult {
  std::vector<SensitivityRow> rows;  // intercept first, then rules in order
  std::vector<double> lambda_values;
  int n_bootstrap = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  // audit trail when keep_bootstrap: [row][lambda][bootstrap] -> (L, U)
  std::vector<std::vector<std::vector<std::pair<double, double>>>> bootstrap_extrema;
};

// Algorithm: for each bootstrap resample, rebuild the rule design and
// W = (X'X)^-1 X' on the resampled rows, refit the propensity model, split
// W_j y into treated and control parts, and extremize each part over the
// marginal sensitivity box; report percentile intervals per lambda.
SensitivityResult sensitivity_intervals(const Dataset& d_inference, const std::vector<Rule>& rules,
                                        const SensitivityConfig& config, int n_threads = 1);

}  // namespace cre
