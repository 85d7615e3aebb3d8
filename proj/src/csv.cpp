#include "splitreg/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace splitreg {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::vector<std::string> split_lines(const std::string& contents) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= contents.size()) {
    const std::size_t nl = contents.find('\n', start);
    std::string line = contents.substr(
        start, nl == std::string::npos ? std::string::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace

Index CsvTable::find_column(const std::string& name) const {
  for (std::size_t j = 0; j < column_names.size(); ++j)
    if (column_names[j] == name) return static_cast<Index>(j);
  return -1;
}

CsvTable parse_numeric_csv(const std::string& contents, const std::string& name) {
  const std::vector<std::string> lines = split_lines(contents);
  if (lines.empty()) throw InvalidInput(name + ": empty file, expected a header row");

  CsvTable table;
  table.column_names = split_fields(lines.front());
  std::set<std::string> seen;
  for (std::size_t j = 0; j < table.column_names.size(); ++j) {
    const std::string& col = table.column_names[j];
    if (col.empty())
      throw InvalidInput(name + ":1: header column " + std::to_string(j + 1) + " is empty");
    if (!seen.insert(col).second)
      throw InvalidInput(name + ":1: duplicate column name \"" + col + "\"");
  }

  const std::size_t cols = table.column_names.size();
  const std::size_t rows = lines.size() - 1;
  table.values.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t line_no = i + 2;  // 1-based, after the header
    const std::vector<std::string> fields = split_fields(lines[i + 1]);
    if (fields.size() != cols)
      throw InvalidInput(name + ":" + std::to_string(line_no) + ": expected " +
                         std::to_string(cols) + " fields, got " +
                         std::to_string(fields.size()));
    for (std::size_t j = 0; j < cols; ++j) {
      const std::string& cell = fields[j];
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw InvalidInput(name + ":" + std::to_string(line_no) + ": column " +
                           std::to_string(j + 1) + " (\"" + table.column_names[j] +
                           "\"): cannot parse \"" + cell + "\" as a number");
      table.values(static_cast<Index>(i), static_cast<Index>(j)) = value;
    }
  }
  return table;
}

CsvTable read_numeric_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_numeric_csv(buffer.str(), path);
}

void write_single_column_csv(const std::string& path, const std::string& header,
                             const Vector& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput(path + ": cannot open file for writing");
  out << header << "\n";
  char buffer[64];
  for (Index i = 0; i < values.size(); ++i) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", values[i]);
    out << buffer << "\n";
  }
  if (!out) throw InvalidInput(path + ": write failed");
}

}  // namespace splitreg
