#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace panelclust::csv {

/// One parsed record and the 1-based line it came from.
struct Record {
  std::size_t line;
  std::vector<std::string> fields;
};

/// Reads delimiter-separated records. Double-quoted fields may contain the
/// delimiter and doubled quotes; a leading UTF-8 BOM, trailing CR and blank
/// lines are ignored. Fields are trimmed of surrounding blanks.
std::vector<Record> read_records(std::istream& in, char delimiter);

/// Quotes a field when it contains the delimiter, a quote or edge blanks.
std::string escape_field(std::string_view field, char delimiter);

/// Empty, NA and N/A (any case) mark a missing cell.
bool is_missing(std::string_view field);

std::optional<double> parse_double(std::string_view field);
std::optional<int> parse_int(std::string_view field);

}  // namespace panelclust::csv
