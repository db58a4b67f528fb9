#include "mktent/cumentropy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "mktent/error.hpp"

namespace mktent {

WindowSequenceSpec WindowSequenceSpec::for_intraday(std::size_t bars_per_day) {
  const std::size_t day = std::max<std::size_t>(bars_per_day, 2);
  return {day, day, 13, day, std::nullopt, AnchorMode::GrowRight};
}

WindowSequenceSpec WindowSequenceSpec::for_daily() {
  return {20, 1, 13, 1, std::nullopt, AnchorMode::GrowRight};
}

std::vector<std::vector<WindowSlice>> build_sequences(std::size_t series_length,
                                                      const WindowSequenceSpec& spec) {
  if (spec.base_length < 2) throw Error(ErrorCode::InvalidArgument, "base_length must be at least 2");
  if (spec.increment == 0) throw Error(ErrorCode::InvalidArgument, "increment must be positive");
  if (spec.stride == 0) throw Error(ErrorCode::InvalidArgument, "stride must be positive");
  if (spec.sequence_count && *spec.sequence_count == 0) {
    throw Error(ErrorCode::InvalidArgument, "sequence_count must be positive");
  }

  const std::size_t span = spec.span();
  if (series_length < span) {
    throw Error(ErrorCode::SeriesTooShort,
                "series of length " + std::to_string(series_length) +
                    " is shorter than one sequence span of " + std::to_string(span));
  }
  const std::size_t available = (series_length - span) / spec.stride + 1;
  const std::size_t count = spec.sequence_count.value_or(available);
  if (count > available) {
    throw Error(ErrorCode::SeriesTooShort,
                std::to_string(count) + " sequences requested but only " +
                    std::to_string(available) + " fit");
  }

  std::vector<std::vector<WindowSlice>> sequences(count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t first = j * spec.stride;
    const std::size_t last = first + span;
    auto& seq = sequences[j];
    seq.reserve(spec.steps + 1);
    for (std::size_t k = 0; k <= spec.steps; ++k) {
      const std::size_t len = spec.base_length + k * spec.increment;
      if (spec.anchor_mode == AnchorMode::GrowRight) {
        seq.push_back({first, first + len, {}});
      } else {
        seq.push_back({last - len, last, {}});
      }
    }
  }
  return sequences;
}

namespace {

bool nested(const WindowSlice& inner, const WindowSlice& outer) {
  return outer.start <= inner.start && inner.end <= outer.end;
}

// Histogram that grows with the window. Under a fixed range only the newly
// covered observations are added; a per-window range is rebuilt whenever
// the window's min or max moves.
class GrowingHistogram {
 public:
  GrowingHistogram(std::span<const double> values, const BinningSpec& spec)
      : values_(values), spec_(spec), counts_(spec.n_bins(), 0) {
    if (spec.is_fixed()) {
      lo_ = spec.range()->lo;
      hi_ = spec.range()->hi;
      width_ = (hi_ - lo_) / static_cast<double>(spec.n_bins());
    }
  }

  void cover(const WindowSlice& w) {
    const bool incremental = total_ > 0 && nested(current_, w);
    if (!spec_.is_fixed()) {
      double lo = incremental ? lo_ : values_[w.start];
      double hi = incremental ? hi_ : values_[w.start];
      auto widen = [&](std::size_t from, std::size_t to) {
        for (std::size_t i = from; i < to; ++i) {
          lo = std::min(lo, values_[i]);
          hi = std::max(hi, values_[i]);
        }
      };
      if (incremental) {
        widen(w.start, current_.start);
        widen(current_.end, w.end);
      } else {
        widen(w.start, w.end);
      }
      if (!incremental || lo != lo_ || hi != hi_) {
        lo_ = lo;
        hi_ = hi;
        width_ = (hi_ - lo_) / static_cast<double>(spec_.n_bins());
        rebuild(w);
        return;
      }
    }
    if (incremental) {
      add(w.start, current_.start);
      add(current_.end, w.end);
      current_ = w;
    } else {
      rebuild(w);
    }
  }

  double entropy() const { return degenerate() ? 0.0 : entropy_from_counts(counts_, total_); }
  double standard_error() const {
    return degenerate() ? 0.0 : entropy_standard_error(counts_, total_);
  }

 private:
  bool degenerate() const { return !spec_.is_fixed() && lo_ == hi_; }

  void rebuild(const WindowSlice& w) {
    std::fill(counts_.begin(), counts_.end(), 0);
    total_ = 0;
    add(w.start, w.end);
    current_ = w;
  }

  void add(std::size_t from, std::size_t to) {
    if (!degenerate()) {
      const std::size_t n = spec_.n_bins();
      for (std::size_t i = from; i < to; ++i) ++counts_[bin_index(values_[i], lo_, width_, n)];
    }
    total_ += to - from;
  }

  std::span<const double> values_;
  BinningSpec spec_;
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
  WindowSlice current_{};
  double lo_ = 0.0;
  double hi_ = 0.0;
  double width_ = 1.0;
};

}  // namespace

EntropySpectrum spectrum(const ReturnSeries& returns, std::span<const WindowSlice> sequence,
                         const BinningSpec& spec, std::size_t sequence_index) {
  if (sequence.empty()) throw Error(ErrorCode::EmptyWindow, "sequence has no windows");

  EntropySpectrum out;
  out.sequence_index = sequence_index;
  out.first_index = sequence.front().start;
  out.last_index = sequence.front().end;
  out.values.reserve(sequence.size());
  out.window_lengths.reserve(sequence.size());
  out.standard_errors.reserve(sequence.size());

  GrowingHistogram hist(returns.values(), spec);
  for (const auto& w : sequence) {
    if (w.start >= w.end) throw Error(ErrorCode::EmptyWindow, "empty window in sequence");
    validate_slice(w, returns.size());
    hist.cover(w);
    out.values.push_back(hist.entropy());
    out.standard_errors.push_back(hist.standard_error());
    out.window_lengths.push_back(w.size());
    out.first_index = std::min(out.first_index, w.start);
    out.last_index = std::max(out.last_index, w.end);
  }
  out.anchor_timestamp = returns.times()[out.first_index];
  return out;
}

std::vector<EntropySpectrum> compute_spectra(const ReturnSeries& returns,
                                             const WindowSequenceSpec& seq_spec,
                                             const BinningSpec& spec, unsigned threads) {
  const auto sequences = build_sequences(returns.size(), seq_spec);
  std::vector<EntropySpectrum> out(sequences.size());

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(sequences.size()));
  if (threads <= 1) {
    for (std::size_t j = 0; j < sequences.size(); ++j) {
      out[j] = spectrum(returns, sequences[j], spec, j);
    }
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t j = next++; j < sequences.size() && !failed; j = next++) {
      try {
        out[j] = spectrum(returns, sequences[j], spec, j);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

BinningSpec series_binning(const ReturnSeries& returns, std::size_t base_length,
                           std::size_t n_bins) {
  const std::size_t bins = n_bins != 0 ? n_bins : velleman_bins(base_length);
  const auto values = returns.values();
  if (values.empty()) return BinningSpec::per_window(bins);
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (!(*mx > *mn)) return BinningSpec::per_window(bins);
  return BinningSpec::fixed(bins, *mn, *mx);
}

namespace {

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

std::vector<EventSignature> detect_events(std::span<const EntropySpectrum> spectra,
                                          const DetectorConfig& config) {
  if (!(config.theta > 0.0)) throw Error(ErrorCode::InvalidArgument, "theta must be positive");
  if (config.min_persistence == 0 || config.baseline == 0) {
    throw Error(ErrorCode::InvalidArgument, "persistence and baseline must be positive");
  }
  const std::size_t needed =
      std::max({std::size_t{8}, 2 * config.min_persistence, config.baseline + 1});
  if (spectra.size() < needed) {
    throw Error(ErrorCode::InsufficientBaseline,
                std::to_string(spectra.size()) + " spectra given, at least " +
                    std::to_string(needed) + " needed");
  }

  const std::size_t count = spectra.size();
  std::vector<double> score(count, 0.0);
  std::vector<double> score_se(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    const auto& v = spectra[j].values;
    if (v.empty()) continue;
    const auto k = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    score[j] = v[k];
    if (k < spectra[j].standard_errors.size()) score_se[j] = spectra[j].standard_errors[k];
  }

  const std::size_t base = config.baseline;
  std::vector<double> excess(count, 0.0);
  std::vector<char> flagged(count, 0);
  for (std::size_t j = base; j < count; ++j) {
    std::vector<double> window(score.begin() + static_cast<std::ptrdiff_t>(j - base),
                               score.begin() + static_cast<std::ptrdiff_t>(j));
    const double med = median_of(window);
    std::vector<double> dev(window.size());
    std::transform(window.begin(), window.end(), dev.begin(),
                   [med](double x) { return std::abs(x - med); });
    const double mad = 1.4826 * median_of(std::move(dev));
    const double se = median_of(std::vector<double>(
        score_se.begin() + static_cast<std::ptrdiff_t>(j - base),
        score_se.begin() + static_cast<std::ptrdiff_t>(j)));
    excess[j] = score[j] - med;
    flagged[j] = excess[j] > config.theta * std::max(mad, se);
  }

  std::vector<EventSignature> events;
  std::size_t j = base;
  while (j < count) {
    if (!flagged[j]) {
      ++j;
      continue;
    }
    std::size_t last = j;
    while (last + 1 < count && flagged[last + 1]) ++last;
    const std::size_t run = last - j + 1;
    if (run >= config.min_persistence) {
      if (!events.empty() && j - events.back().last_index < base) {
        auto& ev = events.back();
        ev.last_index = last;
        ev.persistence += run;
        for (std::size_t i = j; i <= last; ++i) ev.peak_value = std::max(ev.peak_value, score[i]);
      } else {
        EventSignature ev;
        ev.onset_index = j;
        ev.onset_timestamp = spectra[j].anchor_timestamp;
        ev.last_index = last;
        ev.persistence = run;
        ev.peak_value = *std::max_element(score.begin() + static_cast<std::ptrdiff_t>(j),
                                          score.begin() + static_cast<std::ptrdiff_t>(last + 1));
        const auto& v = spectra[j].values;
        double slope = 0.0;
        for (std::size_t k = 1; k < v.size(); ++k) slope = std::max(slope, v[k] - v[k - 1]);
        ev.ramp_slope = slope > 0.0 ? slope : excess[j];
        events.push_back(ev);
      }
    }
    j = last + 1;
  }
  return events;
}

}  // namespace mktent
