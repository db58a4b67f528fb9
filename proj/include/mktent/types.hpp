#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mktent {

/// Naive (zone-less) wall-clock instant, stored at one-second resolution.
using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

enum class Frequency { Daily, FiveMinute };
enum class ReturnKind { Nominal, Log };

const char* to_string(Frequency f) noexcept;
const char* to_string(ReturnKind k) noexcept;

inline Date date_of(Timestamp t) { return std::chrono::floor<std::chrono::days>(t); }

struct PricePoint {
  Timestamp time;
  double close;

  friend bool operator==(const PricePoint&, const PricePoint&) = default;
};

/// Close prices of one instrument, strictly increasing in time.
class PriceSeries {
 public:
  /// Validates the invariants and throws Error(InvalidArgument) on violation.
  PriceSeries(std::string instrument_id, Frequency frequency,
              std::vector<PricePoint> points);

  const std::string& instrument_id() const { return instrument_id_; }
  Frequency frequency() const { return frequency_; }
  const std::vector<PricePoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const PricePoint& operator[](std::size_t i) const { return points_[i]; }

  friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

 private:
  std::string instrument_id_;
  Frequency frequency_;
  std::vector<PricePoint> points_;
};

/// Returns stored column-wise so windows can be handed out as spans.
class ReturnSeries {
 public:
  ReturnSeries(std::string instrument_id, ReturnKind kind, Frequency frequency,
               std::vector<Timestamp> times, std::vector<double> values);

  const std::string& instrument_id() const { return instrument_id_; }
  ReturnKind kind() const { return kind_; }
  Frequency frequency() const { return frequency_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<const Timestamp> times() const { return times_; }

 private:
  std::string instrument_id_;
  ReturnKind kind_;
  Frequency frequency_;
  std::vector<Timestamp> times_;
  std::vector<double> values_;
};

/// Half-open index range [start, end) into a ReturnSeries.
struct WindowSlice {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;

  std::size_t size() const { return end - start; }
  bool contains(std::size_t i) const { return i >= start && i < end; }

  friend bool operator==(const WindowSlice&, const WindowSlice&) = default;
};

/// Throws Error(OutOfRange) unless 0 <= start < end <= series_length.
void validate_slice(const WindowSlice& slice, std::size_t series_length);

std::span<const double> slice_values(const ReturnSeries& returns,
                                     const WindowSlice& slice);

}  // namespace mktent
