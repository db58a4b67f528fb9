#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "mktent/entropy.hpp"
#include "mktent/types.hpp"

namespace mktent {

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // N-1 denominator
  double std_dev = 0.0;
  double min = 0.0;
  double max = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double skewness = 0.0;  // adjusted Fisher-Pearson G1; NaN when N < 3
  double kurtosis = 0.0;  // bias-corrected excess G2; NaN when N < 4
};

/// Throws TooShort for fewer than two values.
SummaryStats summarize(std::span<const double> values);
SummaryStats summarize(const ReturnSeries& returns, const WindowSlice& slice);

/// Linear interpolation between order statistics (R type 7). `sorted` must be
/// ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double p);

/// (after - before) / ((before + after) / 2) as a signed fraction.
/// Throws DegenerateDenominator when before + after == 0.
double pct_difference(double before, double after);

enum class Metric { Entropy, StdDev, Kurtosis };

const char* to_string(Metric m) noexcept;

struct BeforeAfterComparison {
  std::string metric_name;
  double before = 0.0;
  double after = 0.0;
  double pct_difference = 0.0;
};

/// `binning` is only consulted for Metric::Entropy.
BeforeAfterComparison compare_windows(const ReturnSeries& returns,
                                      const WindowSlice& before,
                                      const WindowSlice& after, Metric metric,
                                      const BinningSpec& binning);

}  // namespace mktent
