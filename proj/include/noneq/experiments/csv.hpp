#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace noneq::experiments {

std::string csv_cell(double v);
inline std::string csv_cell(const std::string& v) { return v; }
inline std::string csv_cell(const char* v) { return v; }
inline std::string csv_cell(std::uint64_t v) { return std::to_string(v); }
inline std::string csv_cell(int v) { return std::to_string(v); }

/// Comma-separated file with a fixed header; reals in shortest round-trip form.
class CsvWriter {
 public:
  /// Truncates, or with `append` keeps the existing rows of a file whose
  /// header matches.
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header, bool append = false);

  template <class... T>
  void row(const T&... values) {
    write_row({csv_cell(values)...});
  }
  void write_row(const std::vector<std::string>& cells);
  void flush() { out_.flush(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::size_t n_columns_;
  std::ofstream out_;
};

/// Drops the data rows whose first column, read as a number, is not below
/// `limit`; used to cut a file back to a checkpoint.
void truncate_csv_rows(const std::filesystem::path& path, double limit, bool inclusive);

}  // namespace noneq::experiments
