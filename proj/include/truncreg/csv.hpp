// Minimal deterministic CSV output: header row, comma separation, doubles
// printed with 9 significant digits, LF line endings, UTF-8.
#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace truncreg {

inline std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.9g", value);
  return buffer;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& columns) { write_row(columns); }

  CsvWriter& cell(const std::string& value) {
    row_.push_back(value);
    return *this;
  }
  CsvWriter& cell(double value) { return cell(format_number(value)); }
  CsvWriter& cell(long long value) { return cell(std::to_string(value)); }
  CsvWriter& cell(int value) { return cell(std::to_string(value)); }
  CsvWriter& cell(std::uint64_t value) { return cell(std::to_string(value)); }

  void end_row() {
    write_row(row_);
    row_.clear();
  }

 private:
  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::ostream& out_;
  std::vector<std::string> row_;
};

/// FNV-1a 64-bit hash; used to stamp a config fingerprint into CSV rows.
inline std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings on every platform
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace truncreg
