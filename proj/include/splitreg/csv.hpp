#pragma once

#include <string>
#include <vector>

#include "splitreg/types.hpp"

namespace splitreg {

/// Numeric table read from a comma-separated file: a header row of unique
/// column names followed by rows of '.'-decimal numbers.
struct CsvTable {
  std::vector<std::string> column_names;
  Matrix values;  // one row per data line

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  /// Index of the named column, or -1 when absent.
  Index find_column(const std::string& name) const;
};

/// Parses CSV text. `name` labels the source in error messages, which carry
/// the 1-based line and the column for ragged rows, non-numeric cells,
/// duplicate or empty header names. Cells are trimmed of surrounding blanks;
/// CR line endings and trailing blank lines are tolerated.
CsvTable parse_numeric_csv(const std::string& contents, const std::string& name);

/// parse_numeric_csv over the file's bytes.
CsvTable read_numeric_csv(const std::string& path);

/// One numeric column under the given header, 17-significant-digit decimal
/// (values survive a write/read round trip exactly).
void write_single_column_csv(const std::string& path, const std::string& header,
                             const Vector& values);

}  // namespace splitreg
