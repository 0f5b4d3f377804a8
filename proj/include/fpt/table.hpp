#pragma once

#include <string>
#include <variant>
#include <vector>

#include "fpt/filtration.hpp"

namespace fpt {

/// Column-oriented result table, written as CSV.
class Table {
 public:
  using Column = std::variant<std::vector<double>, std::vector<std::string>>;

  void add(std::string name, std::vector<double> values);
  void add(std::string name, std::vector<std::string> values);

  std::size_t rows() const;
  std::size_t columns() const { return names_.size(); }
  const std::string& name(std::size_t j) const { return names_.at(j); }
  const Column& column(std::size_t j) const { return cols_.at(j); }
  /// Index of the named column; throws ValidationError when absent.
  std::size_t find(const std::string& name) const;
  const std::vector<double>& numeric(const std::string& name) const;

  /// Header row, then one line per row. Numbers as %.16e.
  std::string to_csv() const;
  /// Writes to_csv() to `path` via a temporary file; throws IoError.
  void write_csv(const std::string& path) const;

  std::vector<std::string> warnings;

 private:
  void check_rows(std::size_t n) const;

  std::vector<std::string> names_;
  std::vector<Column> cols_;
};

/// Columns t, value, method, trunc_order.
Table density_table(const DensityCurve& curve);

std::string format_number(double v);

}  // namespace fpt
