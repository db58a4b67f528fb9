#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mktent/entropy.hpp"
#include "mktent/types.hpp"

namespace mktent {

enum class AnchorMode {
  GrowRight,  // windows share a left endpoint and extend forward
  GrowLeft,   // windows share a right endpoint and extend backward
};

/// Sliding family of expanding windows. Sequence j covers
/// [j*stride, j*stride + base_length + steps*increment); window k inside it
/// holds base_length + k*increment observations.
struct WindowSequenceSpec {
  std::size_t base_length = 78;
  std::size_t increment = 78;
  std::size_t steps = 13;
  std::size_t stride = 78;
  std::optional<std::size_t> sequence_count;  // nullopt fills the series
  AnchorMode anchor_mode = AnchorMode::GrowRight;

  std::size_t span() const { return base_length + steps * increment; }

  /// Defaults for a series with `bars_per_day` observations per session:
  /// one-session base and increment, 13 steps, one-session stride.
  static WindowSequenceSpec for_intraday(std::size_t bars_per_day);
  static WindowSequenceSpec for_daily();
};

/// Throws InvalidArgument for a malformed spec and SeriesTooShort when not
/// even one sequence (or the requested count) fits.
std::vector<std::vector<WindowSlice>> build_sequences(std::size_t series_length,
                                                      const WindowSequenceSpec& spec);

struct EntropySpectrum {
  std::size_t sequence_index = 0;
  Timestamp anchor_timestamp{};
  std::vector<double> values;               // H_0 .. H_m
  std::vector<std::size_t> window_lengths;  // observations in window k
  std::vector<double> standard_errors;      // plug-in standard error of values[k]
  std::size_t first_index = 0;              // union of the sequence's windows
  std::size_t last_index = 0;               // exclusive
};

/// Entropy of each nested window of one sequence under a bin count that is
/// held fixed across the sequence. Fixed-range specs update one histogram
/// incrementally as the window grows.
EntropySpectrum spectrum(const ReturnSeries& returns,
                         std::span<const WindowSlice> sequence,
                         const BinningSpec& spec, std::size_t sequence_index = 0);

/// All sequences of `seq_spec`, evaluated on up to `threads` workers
/// (0 = hardware concurrency). Output is ordered by sequence index.
std::vector<EntropySpectrum> compute_spectra(const ReturnSeries& returns,
                                             const WindowSequenceSpec& seq_spec,
                                             const BinningSpec& spec,
                                             unsigned threads = 1);

/// Series-wide fixed binning with velleman_bins(base_length) bins (or
/// `n_bins` when non-zero) over [min, max] of the returns.
BinningSpec series_binning(const ReturnSeries& returns, std::size_t base_length,
                           std::size_t n_bins = 0);

struct DetectorConfig {
  double theta = 3.0;
  std::size_t min_persistence = 2;
  std::size_t baseline = 8;
};

struct EventSignature {
  std::size_t onset_index = 0;
  Timestamp onset_timestamp{};
  double peak_value = 0.0;
  double ramp_slope = 0.0;
  std::size_t persistence = 0;
  std::size_t last_index = 0;  // last flagged sequence of the event
};

/// Robust ramp detector over anchor-ordered spectra.
///
/// Each sequence is scored by its peak entropy max_k H_k. Sequence j is
/// flagged when its score exceeds the median of the previous `baseline`
/// scores by more than theta times the baseline dispersion, taken as the
/// larger of 1.4826*MAD and the median standard error of those peaks.
/// Runs of at least `min_persistence` flagged sequences become events; a run
/// starting within `baseline` sequences of the previous event extends it.
///
/// Throws InsufficientBaseline for fewer than max(8, 2*min_persistence)
/// spectra or fewer than baseline + 1.
std::vector<EventSignature> detect_events(std::span<const EntropySpectrum> spectra,
                                          const DetectorConfig& config = {});

}  // namespace mktent
