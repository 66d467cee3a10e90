#pragma once

// Minimal numeric CSV: one header row of column names, then rows of numbers.
// Fields are unquoted; LF or CRLF line ends are accepted on input, LF is
// written on output.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sfom {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws InvalidParameter if absent.
  std::size_t column(std::string_view name) const;
  std::vector<double> column_values(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
/// Throws IoError when the file cannot be read.
CsvTable read_csv(const std::filesystem::path& path);

/// Writes header and rows with shortest round-trip formatting. NaN is written
/// as `nan`.
void write_csv(std::ostream& out, std::span<const std::string> header,
               std::span<const std::vector<double>> rows);

}  // namespace sfom
