#pragma once

#include <string>
#include <vector>

namespace gazeload {

// Minimal CSV support. All formats used by this project are plain
// comma-separated fields without quoting or embedded commas.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based file line number per row (header is line 1), for error messages.
  std::vector<int> line_numbers;

  int column(const std::string& name) const;  // -1 if absent
};

std::vector<std::string> split_csv_line(const std::string& line);

// Parses CSV text with a header line. `origin` prefixes error messages
// (usually a file path). Throws ParseError on ragged rows.
CsvTable parse_csv(const std::string& text, const std::string& origin);

// Reads a CSV file with a header line. Throws InputError if the file is
// missing and ParseError on ragged rows (with the line number).
CsvTable read_csv(const std::string& path);

// Throws ParseError unless the table header equals `expected` exactly.
void require_csv_header(const CsvTable& table, const std::vector<std::string>& expected,
                        const std::string& origin);

}  // namespace gazeload
