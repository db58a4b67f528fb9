#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mktent/types.hpp"

namespace mktent {

struct FixedRange {
  double lo;
  double hi;
};

/// Bin count plus range policy. Without a fixed range each window is binned
/// over its own [min, max].
class BinningSpec {
 public:
  static BinningSpec per_window(std::size_t n_bins);
  static BinningSpec fixed(std::size_t n_bins, double lo, double hi);

  std::size_t n_bins() const { return n_bins_; }
  bool is_fixed() const { return range_.has_value(); }
  const std::optional<FixedRange>& range() const { return range_; }

 private:
  BinningSpec(std::size_t n, std::optional<FixedRange> r) : n_bins_(n), range_(r) {}

  std::size_t n_bins_;
  std::optional<FixedRange> range_;
};

struct BinnedDistribution {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> masses;
  std::size_t support_count = 0;
  std::size_t clamped = 0;  // values outside a fixed range folded into an end bin

  std::size_t n_bins() const { return masses.size(); }
  double bin_width() const { return (hi - lo) / static_cast<double>(masses.size()); }
};

/// ceil(2 * sqrt(sample_count)), at least 1.
std::size_t velleman_bins(std::size_t sample_count);

/// Maps x onto [0, n_bins) with half-open bins, the last one closed on the
/// right; values outside [lo, hi] land in the nearest end bin.
std::size_t bin_index(double x, double lo, double width, std::size_t n_bins);

/// Throws EmptyWindow on empty input. A per-window set of identical values
/// yields a single bin of mass 1.
BinnedDistribution bin_returns(std::span<const double> values,
                               const BinningSpec& spec);

/// -sum p ln p, with 0 ln 0 = 0.
double shannon_entropy(std::span<const double> masses);
double shannon_entropy(const BinnedDistribution& dist);

/// Entropy straight from bin counts with total `n`.
double entropy_from_counts(std::span<const std::size_t> counts, std::size_t n);

/// Delta-method standard error of the plug-in entropy estimate:
/// sqrt((sum p ln^2 p - H^2) / n).
double entropy_standard_error(std::span<const std::size_t> counts, std::size_t n);

double window_entropy(const ReturnSeries& returns, const WindowSlice& slice,
                      const BinningSpec& spec);

}  // namespace mktent
