#include "fpt/table.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fpt/errors.hpp"

namespace fpt {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void Table::check_rows(std::size_t n) const {
  if (!cols_.empty() && n != rows()) {
    throw ValidationError("table column length " + std::to_string(n) + " does not match " +
                          std::to_string(rows()) + " rows");
  }
}

void Table::add(std::string name, std::vector<double> values) {
  check_rows(values.size());
  names_.push_back(std::move(name));
  cols_.emplace_back(std::move(values));
}

void Table::add(std::string name, std::vector<std::string> values) {
  check_rows(values.size());
  names_.push_back(std::move(name));
  cols_.emplace_back(std::move(values));
}

std::size_t Table::rows() const {
  if (cols_.empty()) return 0;
  return std::visit([](const auto& c) { return c.size(); }, cols_.front());
}

std::size_t Table::find(const std::string& name) const {
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (names_[j] == name) return j;
  }
  throw ValidationError("no column named '" + name + "'");
}

const std::vector<double>& Table::numeric(const std::string& name) const {
  const auto* v = std::get_if<std::vector<double>>(&cols_[find(name)]);
  if (!v) throw ValidationError("column '" + name + "' is not numeric");
  return *v;
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (j) out += ',';
    out += names_[j];
  }
  out += '\n';
  const std::size_t n = rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      if (j) out += ',';
      if (const auto* d = std::get_if<std::vector<double>>(&cols_[j])) {
        out += format_number((*d)[i]);
      } else {
        out += std::get<std::vector<std::string>>(cols_[j])[i];
      }
    }
    out += '\n';
  }
  return out;
}

void Table::write_csv(const std::string& path) const {
  const std::string body = to_csv();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << body;
    if (!f) throw IoError("write to '" + path + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into '" + path + "'");
  }
}

Table density_table(const DensityCurve& curve) {
  Table t;
  t.add("t", curve.times);
  t.add("value", curve.values);
  t.add("method", std::vector<std::string>(curve.times.size(), curve.method));
  t.add("trunc_order", std::vector<std::string>(curve.times.size(), std::to_string(curve.trunc_order)));
  t.warnings = curve.warnings;
  return t;
}

}  // namespace fpt
