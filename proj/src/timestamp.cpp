#include "mktent/timestamp.hpp"

#include <cstdio>

namespace mktent {
namespace {

using namespace std::chrono;

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

std::optional<Date> parse_date_prefix(std::string_view s) {
  int y = 0, m = 0, d = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!read_digits(s, 0, 4, y) || !read_digits(s, 5, 2, m) || !read_digits(s, 8, 2, d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  text = trim(text);
  if (text.size() != 10) return std::nullopt;
  return parse_date_prefix(text);
}

std::optional<ParsedTimestamp> parse_timestamp(std::string_view text) {
  text = trim(text);
  const auto date = parse_date_prefix(text);
  if (!date) return std::nullopt;
  if (text.size() == 10) return ParsedTimestamp{Timestamp{*date}, false};
  if (text.size() != 19 || (text[10] != ' ' && text[10] != 'T')) return std::nullopt;

  // Time separators must agree: HH:MM:SS or HH-MM-SS.
  const char sep = text[13];
  if ((sep != ':' && sep != '-') || text[16] != sep) return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (!read_digits(text, 11, 2, hh) || !read_digits(text, 14, 2, mm) ||
      !read_digits(text, 17, 2, ss)) {
    return std::nullopt;
  }
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
  return ParsedTimestamp{Timestamp{*date} + hours{hh} + minutes{mm} + seconds{ss}, true};
}

std::string format_date(Date d) {
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_month(Date d) {
  const year_month_day ymd{d};
  char buf[12];
  std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()));
  return buf;
}

std::string format_timestamp(Timestamp t, Frequency frequency) {
  const Date d = date_of(t);
  std::string out = format_date(d);
  if (frequency == Frequency::Daily) return out;
  const hh_mm_ss<seconds> tod{t - Timestamp{d}};
  char buf[16];
  std::snprintf(buf, sizeof buf, " %02d:%02d:%02d", static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()), static_cast<int>(tod.seconds().count()));
  return out + buf;
}

}  // namespace mktent
