#pragma once

#include <string>
#include <vector>

namespace otrepair {

// Minimal RFC-4180 CSV: header row required, quoted fields with "" escapes,
// LF or CRLF line endings, UTF-8 passthrough.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column position by name; throws MissingColumn when absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Deterministic shortest-exact formatting for doubles (%.17g), used anywhere
// a file must round-trip bit-exactly.
std::string format_double(double v);

}  // namespace otrepair
