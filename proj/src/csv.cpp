#include "octoarm/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace octoarm {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::span<const std::string> columns)
    : n_columns_(columns.size()) {
  out_.open(path);
  if (!out_)
    throw std::runtime_error("cannot open for writing: " + path.string());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ << ',';
    out_ << columns[i];
  }
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != n_columns_)
    throw std::logic_error("csv row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    out_ << format_number(values[i]);
  }
  out_ << '\n';
}

void CsvWriter::close() { out_.close(); }

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());

  CsvTable table;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty csv: " + path.string());
  table.columns = split_commas(line);

  long ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != table.columns.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(ln) +
                               ": row width does not match the header");
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      char* end = nullptr;
      row[i] = std::strtod(cells[i].c_str(), &end);
      if (end == cells[i].c_str() || *end != '\0')
        throw std::runtime_error(path.string() + ":" + std::to_string(ln) +
                                 ": not a number: '" + cells[i] + "'");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace octoarm
