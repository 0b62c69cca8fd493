#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <string>
#include <vector>

namespace cre {

struct Dataset;

enum class Direction { LE, GT };  // LE inclusive, GT exclusive at the threshold

struct Condition {
  int covariate_index = 0;
  Direction direction = Direction::LE;
  double threshold = 0.0;

  friend bool operator==(const Condition&, const Condition&) = default;
};

// Conjunction of threshold conditions, canonical after construction:
// sorted by (covariate_index, direction, threshold), one condition per
// (covariate_index, direction), never vacuous.
struct Rule {
  std::vector<Condition> conditions;
  std::string label;

  friend bool operator==(const Rule& a, const Rule& b) { return a.conditions == b.conditions; }
};

// Merges redundant conditions (two LE keep the smaller threshold, two GT the
// larger) and sorts. Idempotent.
std::vector<Condition> canonicalize(std::vector<Condition> conditions);

// Canonicalizes and labels. Throws validation errors for empty condition
// lists, vacuous rules (LE t1 with GT t2, t2 >= t1 on one covariate), or
// indices outside [0, K).
Rule make_rule(std::vector<Condition> conditions, const std::vector<std::string>& column_names);

std::string format_threshold(double value);

int evaluate_rule(const Rule& r, const Eigen::Ref<const Eigen::RowVectorXd>& x);

nlohmann::json rule_to_json(const Rule& r, const std::vector<std::string>& column_names);
Rule rule_from_json(const nlohmann::json& j, const std::vector<std::string>& column_names);

struct DroppedRule {
  std::string label;
  std::string reason;
};

// Design matrix of rule indicator columns; constant and duplicate columns are
// removed (first occurrence wins).
struct RuleMatrix {
  std::vector<Rule> rules;
  Eigen::MatrixXd values;  // N x M, entries in {0,1}
  bool includes_intercept = false;
  std::vector<DroppedRule> dropped;
};

RuleMatrix build_rule_matrix(const std::vector<Rule>& rules, const Dataset& d);

}  // namespace cre
