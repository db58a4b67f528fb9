#pragma once

#include <cstddef>
#include <string>

#include "mktent/types.hpp"

namespace mktent {

ReturnSeries log_returns(const PriceSeries& series);
ReturnSeries nominal_returns(const PriceSeries& series);
ReturnSeries compute_returns(const PriceSeries& series, ReturnKind kind);

struct SliceResult {
  WindowSlice slice;
  bool truncated = false;
  std::string warning;
};

/// Covers the first `trading_days` distinct dates at or after `start`. When
/// fewer dates remain the slice is truncated and `truncated` is set.
/// Throws OutOfRange when no date at or after `start` exists.
SliceResult slice_window(const ReturnSeries& returns, Date start,
                         std::size_t trading_days, std::string label = {});

/// Covers the last `trading_days` distinct dates strictly before `end`.
SliceResult slice_window_before(const ReturnSeries& returns, Date end,
                                std::size_t trading_days, std::string label = {});

/// All observations dated within [first, last]. Throws OutOfRange if empty.
WindowSlice slice_dates(const ReturnSeries& returns, Date first, Date last,
                        std::string label = {});

}  // namespace mktent
