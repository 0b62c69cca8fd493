#include "cre/rules.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <utility>

#include "cre/dataset.hpp"
#include "cre/errors.hpp"

namespace cre {

std::vector<Condition> canonicalize(std::vector<Condition> conditions) {
  // covariate -> tightest threshold per direction
  std::map<std::pair<int, Direction>, double> tight;
  for (const auto& c : conditions) {
    const auto key = std::make_pair(c.covariate_index, c.direction);
    const auto it = tight.find(key);
    if (it == tight.end()) {
      tight.emplace(key, c.threshold);
    } else if (c.direction == Direction::LE) {
      it->second = std::min(it->second, c.threshold);
    } else {
      it->second = std::max(it->second, c.threshold);
    }
  }
  std::vector<Condition> out;
  out.reserve(tight.size());
  for (const auto& [key, t] : tight) out.push_back({key.first, key.second, t});
  std::sort(out.begin(), out.end(), [](const Condition& a, const Condition& b) {
    if (a.covariate_index != b.covariate_index) return a.covariate_index < b.covariate_index;
    if (a.direction != b.direction) return a.direction == Direction::LE;
    return a.threshold < b.threshold;
  });
  return out;
}

std::string format_threshold(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Rule make_rule(std::vector<Condition> conditions, const std::vector<std::string>& column_names) {
  if (conditions.empty()) throw validation_error("rule must have at least one condition");
  auto canon = canonicalize(std::move(conditions));

  const int k = static_cast<int>(column_names.size());
  for (std::size_t i = 0; i < canon.size(); ++i) {
    const auto& c = canon[i];
    if (c.covariate_index < 0 || c.covariate_index >= k) {
      throw validation_error("condition covariate index " + std::to_string(c.covariate_index) + " out of range");
    }
    // canonical order puts the LE condition directly before the GT condition
    if (i + 1 < canon.size() && canon[i + 1].covariate_index == c.covariate_index &&
        c.direction == Direction::LE && canon[i + 1].threshold >= c.threshold) {
      throw validation_error("vacuous rule: " + column_names[static_cast<std::size_t>(c.covariate_index)] +
                             " <= " + format_threshold(c.threshold) + " and > " +
                             format_threshold(canon[i + 1].threshold));
    }
  }

  Rule r;
  r.conditions = std::move(canon);
  std::string label;
  for (const auto& c : r.conditions) {
    if (!label.empty()) label += " & ";
    label += column_names[static_cast<std::size_t>(c.covariate_index)];
    label += c.direction == Direction::LE ? "<=" : ">";
    label += format_threshold(c.threshold);
  }
  r.label = std::move(label);
  return r;
}

int evaluate_rule(const Rule& r, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  for (const auto& c : r.conditions) {
    if (c.covariate_index < 0 || c.covariate_index >= x.size()) {
      throw domain_error("rule condition index out of range");
    }
    const double v = x(c.covariate_index);
    const bool ok = c.direction == Direction::LE ? v <= c.threshold : v > c.threshold;
    if (!ok) return 0;
  }
  return 1;
}

nlohmann::json rule_to_json(const Rule& r, const std::vector<std::string>& column_names) {
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : r.conditions) {
    conds.push_back({{"col", column_names.at(static_cast<std::size_t>(c.covariate_index))},
                     {"op", c.direction == Direction::LE ? "<=" : ">"},
                     {"value", c.threshold}});
  }
  return {{"conditions", std::move(conds)}, {"label", r.label}};
}

Rule rule_from_json(const nlohmann::json& j, const std::vector<std::string>& column_names) {
  if (!j.is_object() || !j.contains("conditions") || !j["conditions"].is_array()) {
    throw schema_error("rule JSON must be an object with a 'conditions' array");
  }
  std::vector<Condition> conditions;
  for (const auto& cj : j["conditions"]) {
    if (!cj.is_object() || !cj.contains("col") || !cj.contains("op") || !cj.contains("value")) {
      throw schema_error("rule condition needs 'col', 'op' and 'value'");
    }
    const std::string col = cj["col"].get<std::string>();
    const auto it = std::find(column_names.begin(), column_names.end(), col);
    if (it == column_names.end()) throw schema_error("rule references unknown column '" + col + "'");
    const std::string op = cj["op"].get<std::string>();
    if (op != "<=" && op != ">") throw schema_error("rule condition op must be '<=' or '>', got '" + op + "'");
    if (!cj["value"].is_number()) throw schema_error("rule condition value must be numeric");
    conditions.push_back({static_cast<int>(it - column_names.begin()),
                          op == "<=" ? Direction::LE : Direction::GT, cj["value"].get<double>()});
  }
  return make_rule(std::move(conditions), column_names);
}

RuleMatrix build_rule_matrix(const std::vector<Rule>& rules, const Dataset& d) {
  const int n = d.n();
  RuleMatrix rm;
  std::vector<Eigen::VectorXd> kept_cols;

  for (const auto& rule : rules) {
    Eigen::VectorXd col(n);
    for (int i = 0; i < n; ++i) col(i) = static_cast<double>(evaluate_rule(rule, d.x.row(i)));

    const double s = col.sum();
    if (s == 0.0 || s == static_cast<double>(n)) {
      rm.dropped.push_back({rule.label, "constant column"});
      continue;
    }
    bool duplicate = false;
    for (std::size_t m = 0; m < kept_cols.size(); ++m) {
      if (kept_cols[m] == col) {
        rm.dropped.push_back({rule.label, "duplicate of " + rm.rules[m].label});
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    rm.rules.push_back(rule);
    kept_cols.push_back(std::move(col));
  }

  if (rm.rules.empty()) throw selection_input_error("no rule columns survive constant/duplicate removal");
  rm.values.resize(n, static_cast<int>(kept_cols.size()));
  for (std::size_t m = 0; m < kept_cols.size(); ++m) rm.values.col(static_cast<int>(m)) = kept_cols[m];
  rm.includes_intercept = false;
  return rm;
}

}  // namespace cre
