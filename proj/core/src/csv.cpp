#include "dsched/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace dsched {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : path_(path), out_(path), columns_(header.size()) {
  if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw std::invalid_argument("CsvWriter: column count mismatch in " + path_);
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void CsvWriter::row_numbers(const std::vector<double>& cells) {
  std::vector<std::string> rendered;
  rendered.reserve(cells.size());
  for (double x : cells) rendered.push_back(format_number(x));
  row(rendered);
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec)
    throw std::runtime_error("ensure_directory: " + path + ": " + ec.message());
}

}  // namespace dsched
