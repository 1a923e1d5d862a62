#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "kinlab/errors.hpp"

namespace kinlab {

// Shortest round-trip decimal representation of a double.  "%.17g" always
// round-trips; we keep it fixed (rather than shortest-form trimming) so the
// same value always prints as the same byte string.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

// Minimal CSV writer with deterministic formatting: fixed column order,
// "%.17g" numbers, "\n" line endings.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns)
      : out_(path, std::ios::binary) {
    if (!out_) throw ArgumentError("cannot open file for writing: " + path);
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << ',';
      out_ << columns[i];
    }
    out_ << '\n';
    n_columns_ = columns.size();
  }

  void row(const std::vector<double>& values) {
    if (values.size() != n_columns_)
      throw ArgumentError("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_double(values[i]);
    }
    out_ << '\n';
  }

  // Row with arbitrary preformatted cells (for mixed text/number tables).
  void row_text(const std::vector<std::string>& cells) {
    if (cells.size() != n_columns_)
      throw ArgumentError("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  std::size_t n_columns_ = 0;
};

}  // namespace kinlab
