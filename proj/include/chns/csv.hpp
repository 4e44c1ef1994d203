#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace chns {

/// CSV writer with fixed 17-significant-digit scientific formatting so that
/// identical runs produce bit-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns) : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
    width_ = columns.size();
  }

  void row(const std::vector<double>& values) {
    if (values.size() != width_) throw std::runtime_error("CsvWriter: column count mismatch");
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.16e", values[i]);
      out_ << (i ? "," : "") << buf;
    }
    out_ << "\n";
    if (!out_) throw std::runtime_error("CsvWriter: write failed");
  }

 private:
  std::ofstream out_;
  std::size_t width_ = 0;
};

}  // namespace chns
