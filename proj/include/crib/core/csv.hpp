#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace crib {

/// Scientific notation with 17 significant digits; round-trips doubles.
std::string format_double(double value);

/// Splits one CSV line on commas (no quoting; the formats here are numeric).
std::vector<std::string> split_csv_line(std::string_view line);

/// Reads a numeric CSV with a header row. Returns the header and the rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_numeric_csv(std::istream& in);

}  // namespace crib
