#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cre {

// Category maps directly onto the CLI exit code.
enum class ErrorCategory : int {
  usage = 2,    // bad flags / bad parameter values supplied by the caller
  data = 3,     // schema, parsing, validation, alignment
  numeric = 4,  // convergence, rank, separation, degenerate inputs
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message),
        category_(category),
        kind_(std::move(kind)) {}

  ErrorCategory category() const { return category_; }
  const std::string& kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
  std::string kind_;
};

inline Error usage_error(const std::string& m) { return {ErrorCategory::usage, "usage error", m}; }
inline Error schema_error(const std::string& m) { return {ErrorCategory::data, "schema error", m}; }
inline Error parse_error(const std::string& m) { return {ErrorCategory::data, "parse error", m}; }
inline Error validation_error(const std::string& m) { return {ErrorCategory::data, "validation error", m}; }
inline Error alignment_error(const std::string& m) { return {ErrorCategory::data, "alignment error", m}; }
inline Error domain_error(const std::string& m) { return {ErrorCategory::numeric, "domain error", m}; }
inline Error contract_error(const std::string& m) { return {ErrorCategory::numeric, "contract error", m}; }
inline Error convergence_error(const std::string& m) { return {ErrorCategory::numeric, "convergence error", m}; }
inline Error separation_error(const std::string& m) { return {ErrorCategory::numeric, "separation error", m}; }
inline Error rank_error(const std::string& m) { return {ErrorCategory::numeric, "rank error", m}; }
inline Error arm_error(const std::string& m) { return {ErrorCategory::numeric, "arm error", m}; }
inline Error size_error(const std::string& m) { return {ErrorCategory::numeric, "size error", m}; }
inline Error leverage_error(const std::string& m) { return {ErrorCategory::numeric, "leverage error", m}; }
inline Error singularity_error(const std::string& m) { return {ErrorCategory::numeric, "singularity error", m}; }
inline Error selection_input_error(const std::string& m) { return {ErrorCategory::numeric, "selection-input error", m}; }
inline Error rule_generation_error(const std::string& m) { return {ErrorCategory::numeric, "rule-generation error", m}; }

// Rank-deficient design; carries a maximal independent column subset so the
// caller can drop the offending columns and retry.
class CollinearityError : public Error {
 public:
  CollinearityError(const std::string& message, std::vector<int> independent_columns)
      : Error(ErrorCategory::numeric, "collinearity error", message),
        independent_columns_(std::move(independent_columns)) {}

  const std::vector<int>& independent_columns() const { return independent_columns_; }

 private:
  std::vector<int> independent_columns_;
};

}  // namespace cre
