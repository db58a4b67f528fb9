#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mktent/types.hpp"

namespace mktent {

struct ParsedTimestamp {
  Timestamp time;
  bool has_time_of_day;  // false for "YYYY-MM-DD"
};

/// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH:MM:SS" and "YYYY-MM-DD HH-MM-SS".
std::optional<ParsedTimestamp> parse_timestamp(std::string_view text);

std::optional<Date> parse_date(std::string_view text);

/// "YYYY-MM-DD" for Daily, "YYYY-MM-DD HH:MM:SS" for FiveMinute.
std::string format_timestamp(Timestamp t, Frequency frequency);
std::string format_date(Date d);
/// "YYYY-MM"
std::string format_month(Date d);

}  // namespace mktent
