#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace dsched {

// %.12g rendering of a double, the project-wide decimal format.
std::string format_number(double x);

// Minimal CSV emitter: fixed header, one row per call, numbers at 12
// significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);

  // Convenience for all-numeric rows.
  void row_numbers(const std::vector<double>& cells);

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  size_t columns_;
};

void ensure_directory(const std::string& path);

}  // namespace dsched
