#include "cre/csv.hpp"

#include <charconv>
#include <fstream>
#include <string_view>
#include <system_error>

#include "cre/errors.hpp"

namespace cre {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_cell(std::string_view cell, std::size_t file_line, const std::string& column) {
  if (cell.empty()) {
    throw parse_error("missing value at line " + std::to_string(file_line) + ", column '" + column + "'");
  }
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw parse_error("non-numeric cell '" + std::string(cell) + "' at line " + std::to_string(file_line) +
                      ", column '" + column + "'");
  }
  return value;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw parse_error("empty file '" + path + "'");

  CsvTable table;
  for (const auto field : split_fields(line)) {
    if (field.empty()) throw parse_error("empty column name in header of '" + path + "'");
    table.column_names.emplace_back(field);
  }
  table.n_cols = table.column_names.size();

  std::size_t file_line = 1;
  while (std::getline(in, line)) {
    ++file_line;
    if (trim(line).empty()) continue;  // ignore blank lines (trailing newline etc.)
    const auto fields = split_fields(line);
    if (fields.size() != table.n_cols) {
      throw parse_error("expected " + std::to_string(table.n_cols) + " fields but found " +
                        std::to_string(fields.size()) + " at line " + std::to_string(file_line) + " of '" + path + "'");
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      table.values.push_back(parse_cell(fields[j], file_line, table.column_names[j]));
    }
    ++table.n_rows;
  }
  return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
  if (table.values.size() != table.n_rows * table.n_cols) {
    throw contract_error("csv table shape mismatch");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error("cannot open file '" + path + "' for writing");

  for (std::size_t j = 0; j < table.n_cols; ++j) {
    if (j) out << ',';
    out << table.column_names[j];
  }
  out << '\n';

  char buf[64];
  for (std::size_t i = 0; i < table.n_rows; ++i) {
    for (std::size_t j = 0; j < table.n_cols; ++j) {
      if (j) out << ',';
      const auto res = std::to_chars(buf, buf + sizeof(buf), table.at(i, j));
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw parse_error("write failure on '" + path + "'");
}

}  // namespace cre
