#pragma once

// Brute-force reference computations. These deliberately avoid the library's
// code paths: bins are found by scanning edges, entropy is summed in long
// double from masses, runs are found by exhaustive scans.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <random>
#include <span>
#include <vector>

namespace oracle {

inline std::vector<std::size_t> bin_counts(std::span<const double> values, double lo, double hi,
                                           std::size_t n) {
  std::vector<std::size_t> counts(n, 0);
  const double width = (hi - lo) / static_cast<double>(n);
  for (double x : values) {
    std::size_t bin = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (x >= lo + static_cast<double>(i) * width) bin = i;
    }
    ++counts[bin];
  }
  return counts;
}

inline double entropy_of_counts(const std::vector<std::size_t>& counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  long double h = 0.0L;
  for (auto c : counts) {
    if (c == 0) continue;
    const long double p = static_cast<long double>(c) / static_cast<long double>(total);
    h -= p * std::log(p);
  }
  return static_cast<double>(h);
}

// Entropy of a window binned from scratch. fixed == false uses the window's
// own min/max and maps a constant window to zero.
inline double window_entropy(std::span<const double> values, std::size_t n, bool fixed,
                             double lo = 0.0, double hi = 0.0) {
  if (!fixed) {
    lo = *std::min_element(values.begin(), values.end());
    hi = *std::max_element(values.begin(), values.end());
    if (lo == hi) return 0.0;
  }
  return entropy_of_counts(bin_counts(values, lo, hi, n));
}

// Indices kept by closed-market dedup, by exhaustive run scanning.
inline std::vector<std::size_t> dedup_kept(const std::vector<double>& closes, std::size_t run) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < closes.size(); ++i) {
    std::size_t start = i;
    while (start > 0 && closes[start - 1] == closes[i]) --start;
    std::size_t end = i;
    while (end + 1 < closes.size() && closes[end + 1] == closes[i]) ++end;
    const std::size_t len = end - start + 1;
    if (len <= run || i == start) kept.push_back(i);
  }
  return kept;
}

inline std::vector<double> normal_sample(std::uint64_t seed, std::size_t n, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace oracle
