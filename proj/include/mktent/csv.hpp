#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mktent::csv {

/// Splits one comma-delimited record. Double-quoted fields may contain commas
/// and "" escapes; surrounding whitespace and a trailing '\r' are trimmed.
std::vector<std::string> split_line(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Case-insensitive header lookup.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Parses text with a header row. Blank lines are skipped; a leading UTF-8
/// BOM is ignored.
Table parse(std::string_view text);

/// Fixed six-decimal rendering used by every emitted CSV. NaN prints "nan".
std::string format_real(double value);

std::optional<double> parse_real(std::string_view text);

}  // namespace mktent::csv
