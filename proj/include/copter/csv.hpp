#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace copter {

// Minimal CSV support for the flat, unquoted files this project reads and
// writes. Fields may not contain commas or newlines; a UTF-8 header row is
// required. Trailing '\r' is stripped so CRLF files load cleanly.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;   // each row sized like header
  std::vector<std::size_t> line_numbers;        // 1-based source line per row

  int column(const std::string& name) const;    // -1 when absent
  int require_column(const std::string& name) const;  // throws ParseError
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text, const std::string& origin);

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Strict numeric field parsers; throw ParseError with the row's line number.
double parse_double_field(const std::string& s, std::size_t line,
                          const std::string& what);
long long parse_int_field(const std::string& s, std::size_t line,
                          const std::string& what);

// Shortest round-trip formatting for doubles (used when serializing graphs
// and reports so that load -> save -> load is the identity).
std::string format_double(double v);

}  // namespace copter
