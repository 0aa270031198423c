#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "ratchet/errors.hpp"

namespace ratchet {

// Round-trip-safe rendering with 17 significant digits.
inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Comma-separated table with a '#' comment header. Cells are pre-formatted
// strings so empty cells are representable.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : path_(path), out_(path) {
    if (!out_) throw Error("cannot write '" + path + "'");
  }

  void comment(const std::string& key, const std::string& value) {
    out_ << "# " << key << " = " << value << '\n';
  }

  void columns(const std::vector<std::string>& names) { row(names); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

}  // namespace ratchet
