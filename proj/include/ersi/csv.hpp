// CSV output helpers. All floating-point values print with 17 significant
// digits so files round-trip doubles exactly and reruns compare byte-equal.

#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ersi/errors.hpp"

namespace ersi {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open '" + path + "' for writing");
  }

  // Comment header lines ("# ..."), used to embed the run configuration.
  void comment(const std::string& line) { out_ << "# " << line << "\n"; }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }

  void close() { out_.close(); }

 private:
  std::ofstream out_;
};

}  // namespace ersi
