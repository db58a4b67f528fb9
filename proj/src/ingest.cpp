#include "mktent/ingest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "mktent/csv.hpp"
#include "mktent/error.hpp"
#include "mktent/timestamp.hpp"

namespace mktent {
namespace {

constexpr std::array kDatetimeAliases{"timestamp", "datetime", "date", "time"};
constexpr std::array kCloseAliases{"close", "price", "adj close", "last"};

template <std::size_t N>
std::size_t resolve_column(const csv::Table& table, const std::string& wanted,
                           const std::array<const char*, N>& aliases) {
  if (auto idx = table.column(wanted)) return *idx;
  for (const char* alias : aliases) {
    if (auto idx = table.column(alias)) return *idx;
  }
  throw Error(ErrorCode::MissingColumn, "no column named '" + wanted + "' in CSV header");
}

}  // namespace

ParseResult parse_csv(std::string_view raw_text, Frequency frequency,
                      std::string instrument_id, const CsvColumns& columns) {
  const csv::Table table = csv::parse(raw_text);
  if (table.header.empty()) throw Error(ErrorCode::EmptyInput, "CSV input is empty");

  const std::size_t dt_col = resolve_column(table, columns.datetime, kDatetimeAliases);
  const std::size_t close_col = resolve_column(table, columns.close, kCloseAliases);

  IngestDiagnostics diag;
  std::vector<PricePoint> points;
  points.reserve(table.rows.size());
  std::size_t date_only = 0;
  std::size_t intraday = 0;

  for (const auto& row : table.rows) {
    ++diag.rows_read;
    const auto ts = dt_col < row.size() ? parse_timestamp(row[dt_col]) : std::nullopt;
    if (!ts) {
      ++diag.bad_timestamp;
      continue;
    }
    const auto close = close_col < row.size() ? csv::parse_real(row[close_col]) : std::nullopt;
    if (!close || !std::isfinite(*close) || *close <= 0.0) {
      ++diag.bad_price;
      continue;
    }
    const bool midnight = ts->time == Timestamp{date_of(ts->time)};
    if (!ts->has_time_of_day) {
      ++date_only;
    } else if (!midnight) {
      ++intraday;
    }
    points.push_back({ts->time, *close});
  }

  if (frequency == Frequency::Daily && intraday > 0) {
    throw Error(ErrorCode::AmbiguousTimestampFormat,
                std::to_string(intraday) + " rows carry a time of day in a daily series");
  }
  if (frequency == Frequency::FiveMinute && date_only > 0) {
    throw Error(ErrorCode::AmbiguousTimestampFormat,
                std::to_string(date_only) + " rows lack a time of day in a 5-minute series");
  }

  std::stable_sort(points.begin(), points.end(),
                   [](const PricePoint& a, const PricePoint& b) { return a.time < b.time; });
  const auto last = std::unique(points.begin(), points.end(),
                                [](const PricePoint& a, const PricePoint& b) { return a.time == b.time; });
  diag.duplicate_timestamp = static_cast<std::size_t>(points.end() - last);
  points.erase(last, points.end());

  if (points.empty()) {
    throw Error(ErrorCode::EmptyInput, "no valid rows for instrument '" + instrument_id + "'");
  }
  return {PriceSeries(std::move(instrument_id), frequency, std::move(points)), std::move(diag)};
}

std::string serialize_csv(const PriceSeries& series) {
  std::string out = "timestamp,close\n";
  out.reserve(out.size() + series.size() * 32);
  for (const auto& p : series.points()) {
    out += format_timestamp(p.time, series.frequency());
    out += ',';
    out += csv::format_real(p.close);
    out += '\n';
  }
  return out;
}

DedupResult dedup_closed_market(const PriceSeries& series, std::size_t run_threshold) {
  if (series.frequency() == Frequency::Daily) {
    return {series, 0, {"closed-market dedup skipped: series is daily"}};
  }
  if (run_threshold == 0) throw Error(ErrorCode::InvalidArgument, "run threshold must be positive");

  const auto& pts = series.points();
  std::vector<PricePoint> kept;
  kept.reserve(pts.size());
  std::size_t i = 0;
  while (i < pts.size()) {
    std::size_t j = i + 1;
    while (j < pts.size() && pts[j].close == pts[i].close) ++j;
    if (j - i > run_threshold) {
      kept.push_back(pts[i]);
    } else {
      kept.insert(kept.end(), pts.begin() + static_cast<std::ptrdiff_t>(i),
                  pts.begin() + static_cast<std::ptrdiff_t>(j));
    }
    i = j;
  }
  const std::size_t removed = pts.size() - kept.size();
  return {PriceSeries(series.instrument_id(), series.frequency(), std::move(kept)), removed, {}};
}

PriceSeries aggregate_to_daily(const PriceSeries& series) {
  if (series.empty()) throw Error(ErrorCode::EmptyInput, "cannot aggregate an empty series");
  std::vector<PricePoint> daily;
  for (const auto& p : series.points()) {
    const Timestamp day{date_of(p.time)};
    if (!daily.empty() && daily.back().time == day) {
      daily.back().close = p.close;
    } else {
      daily.push_back({day, p.close});
    }
  }
  return PriceSeries(series.instrument_id(), Frequency::Daily, std::move(daily));
}

}  // namespace mktent
