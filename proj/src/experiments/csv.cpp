#include "noneq/experiments/csv.hpp"

#include "noneq/errors.hpp"
#include "noneq/experiments/config.hpp"

#include <cmath>
#include <sstream>

namespace noneq::experiments {

// Missing values (NaN) are written as empty cells.
std::string csv_cell(double v) { return std::isnan(v) ? std::string() : format_real(v); }

namespace {

std::string join_cells(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header, bool append)
    : path_(path), n_columns_(header.size()) {
  const std::string head = join_cells(header);
  if (append && std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    if (first != head) throw FormatError(path.string() + ": header does not match, cannot append");
    out_.open(path, std::ios::app | std::ios::binary);
  } else {
    out_.open(path, std::ios::trunc | std::ios::binary);
    out_ << head << '\n';
  }
  if (!out_) throw FormatError("cannot write " + path.string());
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
  if (cells.size() != n_columns_)
    throw ParameterError(path_.string() + ": row width does not match the header");
  out_ << join_cells(cells) << '\n';
}

void truncate_csv_rows(const std::filesystem::path& path, double limit, bool inclusive) {
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path, std::ios::binary);
  std::string line, kept;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      kept += line + '\n';
      header = false;
      continue;
    }
    const double key = std::stod(line.substr(0, line.find(',')));
    if (key < limit || (inclusive && key == limit)) kept += line + '\n';
  }
  in.close();
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  out << kept;
}

}  // namespace noneq::experiments
