#include "rloc/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rloc {

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::trunc) {
  if (!out_) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  write_row(header);
}

std::string CsvWriter::format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvWriter::write_row(const std::vector<double>& values) {
  std::string line;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format_double(values[i]);
  }
  out_ << line << '\n';
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  std::string line;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  out_ << line << '\n';
}

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open: " + path.string());
  }
  CsvTable table;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    if (lineno == 1) {
      while (std::getline(ss, field, ',')) table.header.push_back(field);
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, field, ',')) {
      try {
        size_t pos = 0;
        row.push_back(std::stod(field, &pos));
        if (pos != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                 ": not a number: '" + field + "'");
      }
    }
    if (row.size() != table.header.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(table.header.size()) +
                               " fields, got " + std::to_string(row.size()));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace rloc
