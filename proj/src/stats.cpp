#include "mktent/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mktent/error.hpp"

namespace mktent {

double quantile_sorted(std::span<const double> sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SummaryStats summarize(std::span<const double> values) {
  const std::size_t count = values.size();
  if (count < 2) throw Error(ErrorCode::TooShort, "summary statistics need at least two values");
  const double n = static_cast<double>(count);

  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  // A constant sample can leave rounding residue around its mean.
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : sorted.front() == sorted.back() ? std::span<const double>{} : values) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }

  SummaryStats s;
  s.count = count;
  s.mean = mean;
  s.variance = m2 / (n - 1.0);
  s.std_dev = std::sqrt(s.variance);

  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q3 = quantile_sorted(sorted, 0.75);

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  s.skewness = nan;
  s.kurtosis = nan;
  if (m2 > 0.0) {
    const double var_b = m2 / n;
    if (count >= 3) {
      const double g1 = (m3 / n) / std::pow(var_b, 1.5);
      s.skewness = g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
    }
    if (count >= 4) {
      const double g2 = (m4 / n) / (var_b * var_b) - 3.0;
      s.kurtosis = ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
    }
  }
  return s;
}

SummaryStats summarize(const ReturnSeries& returns, const WindowSlice& slice) {
  return summarize(slice_values(returns, slice));
}

double pct_difference(double before, double after) {
  const double mid = (before + after) / 2.0;
  if (mid == 0.0) {
    throw Error(ErrorCode::DegenerateDenominator, "before + after is zero");
  }
  return (after - before) / mid;
}

const char* to_string(Metric m) noexcept {
  switch (m) {
    case Metric::Entropy: return "entropy";
    case Metric::StdDev: return "std_dev";
    case Metric::Kurtosis: return "kurtosis";
  }
  return "unknown";
}

namespace {

double evaluate(const ReturnSeries& returns, const WindowSlice& slice, Metric metric,
                const BinningSpec& binning) {
  switch (metric) {
    case Metric::Entropy: return window_entropy(returns, slice, binning);
    case Metric::StdDev: return summarize(returns, slice).std_dev;
    case Metric::Kurtosis: {
      const auto s = summarize(returns, slice);
      if (std::isnan(s.kurtosis)) {
        throw Error(ErrorCode::TooShort, "kurtosis needs four values with non-zero spread");
      }
      return s.kurtosis;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown metric");
}

}  // namespace

BeforeAfterComparison compare_windows(const ReturnSeries& returns, const WindowSlice& before,
                                      const WindowSlice& after, Metric metric,
                                      const BinningSpec& binning) {
  BeforeAfterComparison c;
  c.metric_name = to_string(metric);
  c.before = evaluate(returns, before, metric, binning);
  c.after = evaluate(returns, after, metric, binning);
  c.pct_difference = pct_difference(c.before, c.after);
  return c;
}

}  // namespace mktent
