#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mktent/types.hpp"

namespace mktent {

struct CsvColumns {
  std::string datetime = "timestamp";
  std::string close = "close";
};

struct IngestDiagnostics {
  std::size_t rows_read = 0;
  std::size_t bad_timestamp = 0;
  std::size_t bad_price = 0;
  std::size_t duplicate_timestamp = 0;
  std::vector<std::string> warnings;

  std::size_t dropped() const {
    return bad_timestamp + bad_price + duplicate_timestamp;
  }
};

struct ParseResult {
  PriceSeries series;
  IngestDiagnostics diagnostics;
};

/// Parses a headed CSV into a sorted PriceSeries. Rows with unparseable
/// timestamps, missing or non-positive prices are dropped and counted.
///
/// If a requested column name is absent, the common aliases
/// (datetime/date/time, price/adj close) are tried before failing with
/// MissingColumn. Throws EmptyInput when no row survives and
/// AmbiguousTimestampFormat when the timestamp shapes contradict
/// `frequency`.
ParseResult parse_csv(std::string_view raw_text, Frequency frequency,
                      std::string instrument_id, const CsvColumns& columns = {});

/// Normalized form: header "timestamp,close", six-decimal closes.
std::string serialize_csv(const PriceSeries& series);

struct DedupResult {
  PriceSeries series;
  std::size_t removed = 0;
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kDefaultClosedMarketRun = 6;

/// Truncates runs of identical consecutive closes longer than
/// `run_threshold` to their first point (closed-market padding).
/// Daily series are returned unchanged with a warning.
DedupResult dedup_closed_market(const PriceSeries& series,
                                std::size_t run_threshold = kDefaultClosedMarketRun);

/// Last close of each calendar date.
PriceSeries aggregate_to_daily(const PriceSeries& series);

}  // namespace mktent
