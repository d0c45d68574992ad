#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace octoarm {

// Shortest round-trippable formatting used for every numeric cell, so
// repeated runs produce byte-identical files.
std::string format_number(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            std::span<const std::string> columns);
  void row(std::span<const double> values);
  void close();

 private:
  std::ofstream out_;
  std::size_t n_columns_ = 0;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace octoarm
