#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cre {

// Dense numeric table, row-major. Every cell must parse as a double.
struct CsvTable {
  std::vector<std::string> column_names;
  std::vector<double> values;  // n_rows * n_cols, row-major
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;

  double at(std::size_t i, std::size_t j) const { return values[i * n_cols + j]; }
};

// Reads a comma-delimited file with a header row. Throws parse errors naming
// the offending file line and column for non-numeric or missing cells.
CsvTable read_csv(const std::string& path);

// Writes values with std::to_chars shortest round-trip formatting, so a
// read_csv of the output reproduces every double bit-for-bit.
void write_csv(const std::string& path, const CsvTable& table);

}  // namespace cre
