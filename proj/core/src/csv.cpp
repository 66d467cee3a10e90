#include "sfom/csv.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sfom/config.hpp"

namespace sfom {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InvalidParameter("CSV has no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::column_values(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line = strip(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (table.header.empty()) {
      for (auto f : fields) table.header.emplace_back(strip(f));
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw InvalidParameter("CSV line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                             " fields, header has " + std::to_string(table.header.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) {
      try {
        row.push_back(parse_double(strip(f)));
      } catch (const InvalidParameter& e) {
        throw InvalidParameter("CSV line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw InvalidParameter("CSV is empty");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

void write_csv(std::ostream& out, std::span<const std::string> header, std::span<const std::vector<double>> rows) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << (std::isnan(row[i]) ? std::string("nan") : format_double(row[i]));
    }
    out << '\n';
  }
}

}  // namespace sfom
