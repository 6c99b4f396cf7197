#include "gazeload/csv.hpp"

#include "gazeload/error.hpp"
#include "gazeload/io.hpp"

namespace gazeload {

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return int(i);
  }
  return -1;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  return split(line, ',');
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
  auto lines = split_lines(text);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("empty csv input: " + origin);
  CsvTable table;
  table.header = split_csv_line(lines[0]);
  for (auto& h : table.header) h = trim(h);
  for (size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto fields = split_csv_line(lines[i]);
    if (fields.size() != table.header.size()) {
      throw ParseError(origin + ":" + std::to_string(i + 1) + ": expected " +
                       std::to_string(table.header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(int(i + 1));
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  return parse_csv(read_file(path), path);
}

void require_csv_header(const CsvTable& table, const std::vector<std::string>& expected,
                        const std::string& origin) {
  if (table.header != expected) {
    std::string want;
    for (const auto& h : expected) {
      if (!want.empty()) want += ',';
      want += h;
    }
    throw ParseError(origin + ": expected header '" + want + "'");
  }
}

}  // namespace gazeload
