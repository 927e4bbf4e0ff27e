#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace rloc {

/// Line-oriented CSV writer for the repo's interchange format: UTF-8, '.'
/// decimal separator, one record per line, doubles serialized with %.17g so
/// that values round-trip exactly through replay.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void write_row(const std::vector<double>& values);
  void write_row(const std::vector<std::string>& fields);

  static std::string format_double(double v);

 private:
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

/// Reads a numeric CSV produced by CsvWriter. Throws std::runtime_error with
/// the file name and line number on malformed content.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace rloc
