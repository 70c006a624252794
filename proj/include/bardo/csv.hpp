#ifndef BARDO_CSV_HPP
#define BARDO_CSV_HPP

#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bardo/error.hpp"

namespace bardo::csv {

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerant.
// Embedded newlines inside quotes are not supported.
inline std::vector<std::string> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw Error(ErrorCode::InvalidParams, "unterminated quote in CSV line");
  return fields;
}

inline std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// Parses text whose first line must equal `header` (column names).
/// Blank lines are skipped.
inline std::vector<std::vector<std::string>> read(std::string_view text,
                                                  const std::vector<std::string>& header) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (first && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_line(line);
    if (first) {
      first = false;
      if (fields != header)
        throw Error(ErrorCode::InvalidParams, "unexpected CSV header: " + line);
      continue;
    }
    if (fields.size() != header.size())
      throw Error(ErrorCode::InvalidParams,
                  "CSV line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields");
    rows.push_back(std::move(fields));
  }
  if (first) throw Error(ErrorCode::InvalidParams, "CSV input has no header");
  return rows;
}

}  // namespace bardo::csv

#endif  // BARDO_CSV_HPP
