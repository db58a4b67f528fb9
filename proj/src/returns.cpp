#include "mktent/returns.hpp"

#include <cmath>
#include <utility>

#include "mktent/error.hpp"
#include "mktent/timestamp.hpp"

namespace mktent {

ReturnSeries compute_returns(const PriceSeries& series, ReturnKind kind) {
  if (series.size() < 2) {
    throw Error(ErrorCode::TooShort, "returns need at least two prices");
  }
  const auto& pts = series.points();
  std::vector<Timestamp> times;
  std::vector<double> values;
  times.reserve(pts.size() - 1);
  values.reserve(pts.size() - 1);
  for (std::size_t t = 1; t < pts.size(); ++t) {
    const double ratio = pts[t].close / pts[t - 1].close;
    times.push_back(pts[t].time);
    values.push_back(kind == ReturnKind::Log ? std::log(ratio) : ratio - 1.0);
  }
  return ReturnSeries(series.instrument_id(), kind, series.frequency(), std::move(times),
                      std::move(values));
}

ReturnSeries log_returns(const PriceSeries& series) {
  return compute_returns(series, ReturnKind::Log);
}

ReturnSeries nominal_returns(const PriceSeries& series) {
  return compute_returns(series, ReturnKind::Nominal);
}

SliceResult slice_window(const ReturnSeries& returns, Date start, std::size_t trading_days,
                         std::string label) {
  if (trading_days == 0) throw Error(ErrorCode::InvalidArgument, "trading_days must be positive");
  const auto times = returns.times();
  std::size_t first = 0;
  while (first < times.size() && date_of(times[first]) < start) ++first;
  if (first == times.size()) {
    throw Error(ErrorCode::OutOfRange, "start date " + format_date(start) + " is after the last observation");
  }

  std::size_t dates = 0;
  std::size_t end = first;
  while (end < times.size()) {
    const Date d = date_of(times[end]);
    if (++dates > trading_days) break;
    while (end < times.size() && date_of(times[end]) == d) ++end;
  }
  SliceResult result{{first, end, std::move(label)}, false, {}};
  if (dates < trading_days) {
    result.truncated = true;
    result.warning = "window from " + format_date(start) + " has " + std::to_string(dates) +
                     " of " + std::to_string(trading_days) + " trading days";
  }
  return result;
}

SliceResult slice_window_before(const ReturnSeries& returns, Date end_date,
                                std::size_t trading_days, std::string label) {
  if (trading_days == 0) throw Error(ErrorCode::InvalidArgument, "trading_days must be positive");
  const auto times = returns.times();
  std::size_t end = 0;
  while (end < times.size() && date_of(times[end]) < end_date) ++end;
  if (end == 0) {
    throw Error(ErrorCode::OutOfRange, "no observations before " + format_date(end_date));
  }

  std::size_t dates = 0;
  std::size_t start = end;
  while (start > 0) {
    const Date d = date_of(times[start - 1]);
    if (++dates > trading_days) break;
    while (start > 0 && date_of(times[start - 1]) == d) --start;
  }
  dates = std::min(dates, trading_days);
  SliceResult result{{start, end, std::move(label)}, false, {}};
  if (dates < trading_days) {
    result.truncated = true;
    result.warning = "window before " + format_date(end_date) + " has " + std::to_string(dates) +
                     " of " + std::to_string(trading_days) + " trading days";
  }
  return result;
}

WindowSlice slice_dates(const ReturnSeries& returns, Date first, Date last, std::string label) {
  const auto times = returns.times();
  std::size_t start = 0;
  while (start < times.size() && date_of(times[start]) < first) ++start;
  std::size_t end = start;
  while (end < times.size() && date_of(times[end]) <= last) ++end;
  if (start == end) {
    throw Error(ErrorCode::OutOfRange,
                "no observations between " + format_date(first) + " and " + format_date(last));
  }
  return {start, end, std::move(label)};
}

}  // namespace mktent
