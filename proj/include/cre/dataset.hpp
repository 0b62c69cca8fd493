#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace cre {

// Observational sample: outcome y, binary treatment z, covariate matrix x.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::VectorXi z;  // entries in {0,1}
  Eigen::MatrixXd x;  // N x K
  std::vector<std::string> column_names;  // K names, file order

  int n() const { return static_cast<int>(y.size()); }
  int k() const { return static_cast<int>(x.cols()); }

  int n_treated() const { return z.sum(); }
  int n_control() const { return n() - n_treated(); }

  // Row subset in the given index order.
  Dataset subset(const std::vector<int>& indices) const;
};

// Disjoint partition of {0..N-1} into a discovery and an inference sample.
struct SplitIndices {
  std::vector<int> discovery;  // ascending
  std::vector<int> inference;  // ascending
  double ratio = 0.0;
  std::uint64_t seed = 0;
};

// Loads a header-bearing numeric CSV. Covariates are all columns except the
// outcome and treatment columns, kept in file order.
Dataset load_dataset(const std::string& path, const std::string& outcome_col, const std::string& treatment_col);

// Inverse of load_dataset up to column placement: writes outcome_col,
// treatment_col, then covariates. Round-trips bit-identically.
void save_dataset(const Dataset& d, const std::string& path, const std::string& outcome_col = "y",
                  const std::string& treatment_col = "z");

// Uniformly random partition; |discovery| = round(ratio*N). Deterministic
// given seed (stream: split).
SplitIndices split_sample(const Dataset& d, double ratio, std::uint64_t seed);

}  // namespace cre
