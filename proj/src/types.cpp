#include "mktent/types.hpp"

#include <cmath>
#include <utility>

#include "mktent/error.hpp"

namespace mktent {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::AmbiguousTimestampFormat: return "AmbiguousTimestampFormat";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::InsufficientBaseline: return "InsufficientBaseline";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

const char* to_string(Frequency f) noexcept {
  return f == Frequency::Daily ? "daily" : "5min";
}

const char* to_string(ReturnKind k) noexcept {
  return k == ReturnKind::Log ? "log" : "nominal";
}

PriceSeries::PriceSeries(std::string instrument_id, Frequency frequency,
                         std::vector<PricePoint> points)
    : instrument_id_(std::move(instrument_id)),
      frequency_(frequency),
      points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.close) || p.close <= 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "close at position " + std::to_string(i) + " is not a finite positive number");
    }
    if (i > 0 && !(points_[i - 1].time < p.time)) {
      throw Error(ErrorCode::InvalidArgument,
                  "timestamps are not strictly increasing at position " + std::to_string(i));
    }
    if (frequency_ == Frequency::Daily && p.time != Timestamp{date_of(p.time)}) {
      throw Error(ErrorCode::InvalidArgument, "daily series carries a time-of-day component");
    }
  }
}

ReturnSeries::ReturnSeries(std::string instrument_id, ReturnKind kind,
                           Frequency frequency, std::vector<Timestamp> times,
                           std::vector<double> values)
    : instrument_id_(std::move(instrument_id)),
      kind_(kind),
      frequency_(frequency),
      times_(std::move(times)),
      values_(std::move(values)) {
  if (times_.size() != values_.size()) {
    throw Error(ErrorCode::InvalidArgument, "return times and values differ in length");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite return value");
  }
}

void validate_slice(const WindowSlice& slice, std::size_t series_length) {
  if (slice.start >= slice.end || slice.end > series_length) {
    throw Error(ErrorCode::OutOfRange,
                "window [" + std::to_string(slice.start) + ", " + std::to_string(slice.end) +
                    ") is invalid for a series of length " + std::to_string(series_length));
  }
}

std::span<const double> slice_values(const ReturnSeries& returns, const WindowSlice& slice) {
  validate_slice(slice, returns.size());
  return returns.values().subspan(slice.start, slice.size());
}

}  // namespace mktent
