#include "cre/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "cre/csv.hpp"
#include "cre/errors.hpp"
#include "cre/rng.hpp"

namespace cre {

Dataset Dataset::subset(const std::vector<int>& indices) const {
  Dataset out;
  const int m = static_cast<int>(indices.size());
  out.y.resize(m);
  out.z.resize(m);
  out.x.resize(m, x.cols());
  for (int i = 0; i < m; ++i) {
    const int r = indices[static_cast<std::size_t>(i)];
    if (r < 0 || r >= n()) throw domain_error("subset index out of range");
    out.y(i) = y(r);
    out.z(i) = z(r);
    out.x.row(i) = x.row(r);
  }
  out.column_names = column_names;
  return out;
}

Dataset load_dataset(const std::string& path, const std::string& outcome_col, const std::string& treatment_col) {
  const CsvTable table = read_csv(path);

  const auto find_col = [&](const std::string& name) {
    const auto it = std::find(table.column_names.begin(), table.column_names.end(), name);
    if (it == table.column_names.end()) {
      throw schema_error("column '" + name + "' not found in '" + path + "'");
    }
    return static_cast<std::size_t>(it - table.column_names.begin());
  };
  const std::size_t yi = find_col(outcome_col);
  const std::size_t zi = find_col(treatment_col);
  if (yi == zi) throw schema_error("outcome and treatment columns must differ");

  Dataset d;
  const std::size_t n = table.n_rows;
  const std::size_t k = table.n_cols - 2;
  d.y.resize(static_cast<int>(n));
  d.z.resize(static_cast<int>(n));
  d.x.resize(static_cast<int>(n), static_cast<int>(k));
  for (std::size_t j = 0; j < table.n_cols; ++j) {
    if (j != yi && j != zi) d.column_names.push_back(table.column_names[j]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < table.n_cols; ++j) {
      const double v = table.at(i, j);
      if (std::isnan(v)) {
        throw parse_error("missing value (NaN) at data row " + std::to_string(i + 1) + ", column '" +
                          table.column_names[j] + "'");
      }
      if (j == yi) {
        d.y(static_cast<int>(i)) = v;
      } else if (j == zi) {
        if (v != 0.0 && v != 1.0) {
          throw validation_error("treatment value " + std::to_string(v) + " outside {0,1} at data row " +
                                 std::to_string(i + 1));
        }
        d.z(static_cast<int>(i)) = static_cast<int>(v);
      } else {
        d.x(static_cast<int>(i), static_cast<int>(c++)) = v;
      }
    }
  }
  return d;
}

void save_dataset(const Dataset& d, const std::string& path, const std::string& outcome_col,
                  const std::string& treatment_col) {
  CsvTable table;
  table.column_names.push_back(outcome_col);
  table.column_names.push_back(treatment_col);
  for (const auto& name : d.column_names) table.column_names.push_back(name);
  table.n_rows = static_cast<std::size_t>(d.n());
  table.n_cols = static_cast<std::size_t>(d.k() + 2);
  table.values.reserve(table.n_rows * table.n_cols);
  for (int i = 0; i < d.n(); ++i) {
    table.values.push_back(d.y(i));
    table.values.push_back(static_cast<double>(d.z(i)));
    for (int j = 0; j < d.k(); ++j) table.values.push_back(d.x(i, j));
  }
  write_csv(path, table);
}

SplitIndices split_sample(const Dataset& d, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw domain_error("split ratio must lie in (0,1)");
  const int n = d.n();
  if (n < 2) throw domain_error("split requires at least 2 rows");
  const int n_disc = static_cast<int>(std::lround(ratio * n));
  if (n_disc < 1 || n_disc >= n) {
    throw domain_error("split ratio leaves an empty subsample at N=" + std::to_string(n));
  }

  Rng rng(derive_seed(seed, stream::split));
  const std::vector<int> perm = rng.permutation(n);

  SplitIndices s;
  s.discovery.assign(perm.begin(), perm.begin() + n_disc);
  s.inference.assign(perm.begin() + n_disc, perm.end());
  std::sort(s.discovery.begin(), s.discovery.end());
  std::sort(s.inference.begin(), s.inference.end());
  s.ratio = ratio;
  s.seed = seed;
  return s;
}

}  // namespace cre
