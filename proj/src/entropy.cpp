#include "mktent/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "mktent/error.hpp"

namespace mktent {

BinningSpec BinningSpec::per_window(std::size_t n_bins) {
  if (n_bins == 0) throw Error(ErrorCode::InvalidArgument, "n_bins must be at least 1");
  return BinningSpec(n_bins, std::nullopt);
}

BinningSpec BinningSpec::fixed(std::size_t n_bins, double lo, double hi) {
  if (n_bins == 0) throw Error(ErrorCode::InvalidArgument, "n_bins must be at least 1");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    throw Error(ErrorCode::InvalidArgument, "fixed bin range needs finite lo < hi");
  }
  return BinningSpec(n_bins, FixedRange{lo, hi});
}

std::size_t velleman_bins(std::size_t sample_count) {
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * std::sqrt(static_cast<double>(sample_count))));
  return std::max<std::size_t>(n, 1);
}

std::size_t bin_index(double x, double lo, double width, std::size_t n_bins) {
  if (!(x > lo)) return 0;
  const double pos = (x - lo) / width;
  if (!(pos < static_cast<double>(n_bins))) return n_bins - 1;
  // The quotient can round across an edge; settle against the edges
  // lo + i*width that the pmf report prints.
  std::size_t i = std::min(static_cast<std::size_t>(pos), n_bins - 1);
  if (i > 0 && x < lo + static_cast<double>(i) * width) --i;
  else if (i + 1 < n_bins && x >= lo + static_cast<double>(i + 1) * width) ++i;
  return i;
}

BinnedDistribution bin_returns(std::span<const double> values, const BinningSpec& spec) {
  if (values.empty()) throw Error(ErrorCode::EmptyWindow, "cannot bin an empty window");

  BinnedDistribution dist;
  dist.support_count = values.size();
  if (spec.is_fixed()) {
    dist.lo = spec.range()->lo;
    dist.hi = spec.range()->hi;
  } else {
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    dist.lo = *mn;
    dist.hi = *mx;
    if (dist.lo == dist.hi) {
      dist.masses = {1.0};
      return dist;
    }
  }

  const std::size_t n = spec.n_bins();
  const double width = (dist.hi - dist.lo) / static_cast<double>(n);
  std::vector<std::size_t> counts(n, 0);
  for (double x : values) {
    if (x < dist.lo || x > dist.hi) ++dist.clamped;
    ++counts[bin_index(x, dist.lo, width, n)];
  }
  dist.masses.resize(n);
  const double total = static_cast<double>(values.size());
  for (std::size_t i = 0; i < n; ++i) dist.masses[i] = static_cast<double>(counts[i]) / total;
  return dist;
}

double shannon_entropy(std::span<const double> masses) {
  double h = 0.0;
  for (double p : masses) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double shannon_entropy(const BinnedDistribution& dist) { return shannon_entropy(dist.masses); }

double entropy_from_counts(std::span<const std::size_t> counts, std::size_t n) {
  const double total = static_cast<double>(n);
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

double entropy_standard_error(std::span<const std::size_t> counts, std::size_t n) {
  const double total = static_cast<double>(n);
  double h = 0.0;
  double second = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    const double l = std::log(p);
    h -= p * l;
    second += p * l * l;
  }
  return std::sqrt(std::max(second - h * h, 0.0) / total);
}

double window_entropy(const ReturnSeries& returns, const WindowSlice& slice,
                      const BinningSpec& spec) {
  return shannon_entropy(bin_returns(slice_values(returns, slice), spec));
}

}  // namespace mktent
