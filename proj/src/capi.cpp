#include "mktent.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "mktent/cumentropy.hpp"
#include "mktent/error.hpp"
#include "mktent/ingest.hpp"
#include "mktent/io.hpp"
#include "mktent/report.hpp"
#include "mktent/returns.hpp"
#include "mktent/stats.hpp"
#include "mktent/synth.hpp"
#include "mktent/timestamp.hpp"

struct mkt_prices {
  mktent::PriceSeries series;
};

struct mkt_returns {
  mktent::ReturnSeries series;
};

struct mkt_spectra {
  std::vector<mktent::EntropySpectrum> spectra;
  mktent::Frequency frequency;
};

struct mkt_events {
  std::vector<mktent::EventSignature> events;
  mktent::Frequency frequency;
};

struct mkt_injections {
  std::vector<mktent::Injection> log;
  mktent::Frequency frequency;
};

namespace {

using namespace mktent;

thread_local std::string g_last_error;

mkt_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return MKT_E_INVALID_ARGUMENT;
    case ErrorCode::MissingColumn: return MKT_E_MISSING_COLUMN;
    case ErrorCode::EmptyInput: return MKT_E_EMPTY_INPUT;
    case ErrorCode::AmbiguousTimestampFormat: return MKT_E_AMBIGUOUS_TIMESTAMP;
    case ErrorCode::TooShort: return MKT_E_TOO_SHORT;
    case ErrorCode::OutOfRange: return MKT_E_OUT_OF_RANGE;
    case ErrorCode::EmptyWindow: return MKT_E_EMPTY_WINDOW;
    case ErrorCode::DegenerateDenominator: return MKT_E_DEGENERATE_DENOMINATOR;
    case ErrorCode::SeriesTooShort: return MKT_E_SERIES_TOO_SHORT;
    case ErrorCode::InsufficientBaseline: return MKT_E_INSUFFICIENT_BASELINE;
    case ErrorCode::Io: return MKT_E_IO;
  }
  return MKT_E_INTERNAL;
}

mkt_status fail(mkt_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
mkt_status guard(F&& body) noexcept {
  try {
    g_last_error.clear();
    body();
    return MKT_OK;
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MKT_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MKT_E_INTERNAL, e.what());
  } catch (...) {
    return fail(MKT_E_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

Frequency from_c(mkt_frequency f) {
  return f == MKT_DAILY ? Frequency::Daily : Frequency::FiveMinute;
}

mkt_frequency to_c(Frequency f) { return f == Frequency::Daily ? MKT_DAILY : MKT_FIVE_MINUTE; }

Timestamp from_c_time(mkt_time t) { return Timestamp{std::chrono::seconds{t}}; }
mkt_time to_c_time(Timestamp t) { return t.time_since_epoch().count(); }

WindowSlice from_c(mkt_window w) { return {w.start, w.end, {}}; }
mkt_window to_c(const WindowSlice& w) { return {w.start, w.end}; }

BinningSpec from_c(const mkt_binning* b) {
  require(b != nullptr, "binning is null");
  return b->fixed_range ? BinningSpec::fixed(b->n_bins, b->lo, b->hi)
                        : BinningSpec::per_window(b->n_bins);
}

WindowSequenceSpec from_c(const mkt_sequence_spec* s) {
  require(s != nullptr, "sequence spec is null");
  WindowSequenceSpec spec;
  spec.base_length = s->base_length;
  spec.increment = s->increment;
  spec.steps = s->steps;
  spec.stride = s->stride;
  if (s->sequence_count != 0) spec.sequence_count = s->sequence_count;
  spec.anchor_mode = s->anchor_mode == MKT_GROW_LEFT ? AnchorMode::GrowLeft : AnchorMode::GrowRight;
  return spec;
}

mkt_sequence_spec to_c(const WindowSequenceSpec& s) {
  return {s.base_length, s.increment, s.steps, s.stride, s.sequence_count.value_or(0),
          s.anchor_mode == AnchorMode::GrowLeft ? MKT_GROW_LEFT : MKT_GROW_RIGHT};
}

void fill(const SummaryStats& s, mkt_summary* out) {
  *out = {s.count, s.mean, s.variance, s.std_dev, s.min, s.max, s.q1, s.median, s.q3,
          s.skewness, s.kurtosis};
}

CsvColumns columns(const char* dt_col, const char* close_col) {
  CsvColumns c;
  if (dt_col && *dt_col) c.datetime = dt_col;
  if (close_col && *close_col) c.close = close_col;
  return c;
}

void fill(const IngestDiagnostics& d, mkt_ingest_diag* out) {
  if (!out) return;
  *out = {d.rows_read, d.bad_timestamp, d.bad_price, d.duplicate_timestamp, d.dropped()};
}

}  // namespace

extern "C" {

const char* mkt_version(void) { return "1.0.0"; }

const char* mkt_last_error(void) { return g_last_error.c_str(); }

const char* mkt_status_name(mkt_status status) {
  switch (status) {
    case MKT_OK: return "ok";
    case MKT_E_INVALID_ARGUMENT: return "InvalidArgument";
    case MKT_E_MISSING_COLUMN: return "MissingColumn";
    case MKT_E_EMPTY_INPUT: return "EmptyInput";
    case MKT_E_AMBIGUOUS_TIMESTAMP: return "AmbiguousTimestampFormat";
    case MKT_E_TOO_SHORT: return "TooShort";
    case MKT_E_OUT_OF_RANGE: return "OutOfRange";
    case MKT_E_EMPTY_WINDOW: return "EmptyWindow";
    case MKT_E_DEGENERATE_DENOMINATOR: return "DegenerateDenominator";
    case MKT_E_SERIES_TOO_SHORT: return "SeriesTooShort";
    case MKT_E_INSUFFICIENT_BASELINE: return "InsufficientBaseline";
    case MKT_E_IO: return "Io";
    case MKT_E_INTERNAL: return "Internal";
  }
  return "Unknown";
}

mkt_status mkt_format_time(mkt_time t, mkt_frequency freq, char* buf, size_t cap) {
  return guard([&] {
    require(buf != nullptr, "buffer is null");
    const std::string s = format_timestamp(from_c_time(t), from_c(freq));
    require(s.size() < cap, "buffer too small");
    std::memcpy(buf, s.c_str(), s.size() + 1);
  });
}

mkt_status mkt_parse_date(const char* text, mkt_time* out) {
  return guard([&] {
    require(text && out, "null argument");
    const auto d = parse_date(text);
    if (!d) throw Error(ErrorCode::InvalidArgument, std::string("not a YYYY-MM-DD date: ") + text);
    *out = to_c_time(Timestamp{*d});
  });
}

/* ---- ingest ---- */

mkt_status mkt_prices_parse_csv(const char* text, size_t len, mkt_frequency freq,
                                const char* instrument_id, const char* dt_col,
                                const char* close_col, mkt_prices** out, mkt_ingest_diag* diag) {
  return guard([&] {
    require(out != nullptr && (text != nullptr || len == 0), "null argument");
    *out = nullptr;
    auto r = parse_csv(std::string_view(text ? text : "", len), from_c(freq),
                       instrument_id ? instrument_id : "", columns(dt_col, close_col));
    fill(r.diagnostics, diag);
    *out = new mkt_prices{std::move(r.series)};
  });
}

mkt_status mkt_prices_read_csv(const char* path, mkt_frequency freq, const char* instrument_id,
                               const char* dt_col, const char* close_col, mkt_prices** out,
                               mkt_ingest_diag* diag) {
  return guard([&] {
    require(path && out, "null argument");
    *out = nullptr;
    const std::string text = read_file(path);
    auto r = parse_csv(text, from_c(freq), instrument_id ? instrument_id : "",
                       columns(dt_col, close_col));
    fill(r.diagnostics, diag);
    *out = new mkt_prices{std::move(r.series)};
  });
}

mkt_status mkt_prices_write_csv(const mkt_prices* prices, const char* path) {
  return guard([&] {
    require(prices && path, "null argument");
    write_file_atomic(path, serialize_csv(prices->series));
  });
}

mkt_status mkt_prices_dedup(const mkt_prices* prices, size_t run_threshold, mkt_prices** out,
                            size_t* removed) {
  return guard([&] {
    require(prices && out, "null argument");
    *out = nullptr;
    auto r = dedup_closed_market(prices->series, run_threshold);
    if (removed) *removed = r.removed;
    *out = new mkt_prices{std::move(r.series)};
  });
}

mkt_status mkt_prices_aggregate_daily(const mkt_prices* prices, mkt_prices** out) {
  return guard([&] {
    require(prices && out, "null argument");
    *out = nullptr;
    *out = new mkt_prices{aggregate_to_daily(prices->series)};
  });
}

size_t mkt_prices_size(const mkt_prices* prices) { return prices ? prices->series.size() : 0; }

mkt_frequency mkt_prices_frequency(const mkt_prices* prices) {
  return prices ? to_c(prices->series.frequency()) : MKT_DAILY;
}

const char* mkt_prices_instrument(const mkt_prices* prices) {
  return prices ? prices->series.instrument_id().c_str() : "";
}

mkt_status mkt_prices_get(const mkt_prices* prices, size_t i, mkt_time* t, double* close) {
  return guard([&] {
    require(prices != nullptr, "null argument");
    if (i >= prices->series.size()) throw Error(ErrorCode::OutOfRange, "price index out of range");
    if (t) *t = to_c_time(prices->series[i].time);
    if (close) *close = prices->series[i].close;
  });
}

size_t mkt_prices_bars_per_day(const mkt_prices* prices) {
  if (!prices || prices->series.empty()) return 0;
  std::vector<size_t> per_day;
  Date current{};
  for (const auto& p : prices->series.points()) {
    const Date d = date_of(p.time);
    if (per_day.empty() || d != current) {
      per_day.push_back(0);
      current = d;
    }
    ++per_day.back();
  }
  auto mid = per_day.begin() + static_cast<std::ptrdiff_t>(per_day.size() / 2);
  std::nth_element(per_day.begin(), mid, per_day.end());
  return *mid;
}

void mkt_prices_free(mkt_prices* prices) { delete prices; }

/* ---- returns ---- */

mkt_status mkt_returns_compute(const mkt_prices* prices, mkt_return_kind kind, mkt_returns** out) {
  return guard([&] {
    require(prices && out, "null argument");
    *out = nullptr;
    *out = new mkt_returns{
        compute_returns(prices->series, kind == MKT_LOG ? ReturnKind::Log : ReturnKind::Nominal)};
  });
}

size_t mkt_returns_size(const mkt_returns* returns) { return returns ? returns->series.size() : 0; }

const double* mkt_returns_values(const mkt_returns* returns) {
  return returns ? returns->series.values().data() : nullptr;
}

mkt_time mkt_returns_time(const mkt_returns* returns, size_t i) {
  if (!returns || i >= returns->series.size()) return 0;
  return to_c_time(returns->series.times()[i]);
}

void mkt_returns_free(mkt_returns* returns) { delete returns; }

mkt_status mkt_returns_subset(const mkt_returns* returns, mkt_window window, mkt_returns** out) {
  return guard([&] {
    require(returns && out, "null argument");
    *out = nullptr;
    const auto& r = returns->series;
    validate_slice(from_c(window), r.size());
    const auto times = r.times().subspan(window.start, window.end - window.start);
    const auto values = r.values().subspan(window.start, window.end - window.start);
    *out = new mkt_returns{ReturnSeries(r.instrument_id(), r.kind(), r.frequency(),
                                        {times.begin(), times.end()},
                                        {values.begin(), values.end()})};
  });
}

mkt_status mkt_returns_window_from(const mkt_returns* returns, mkt_time start,
                                   size_t trading_days, mkt_window* out, int* truncated) {
  return guard([&] {
    require(returns && out, "null argument");
    const auto r = slice_window(returns->series, date_of(from_c_time(start)), trading_days);
    *out = to_c(r.slice);
    if (truncated) *truncated = r.truncated ? 1 : 0;
  });
}

mkt_status mkt_returns_window_before(const mkt_returns* returns, mkt_time end,
                                     size_t trading_days, mkt_window* out, int* truncated) {
  return guard([&] {
    require(returns && out, "null argument");
    const auto r = slice_window_before(returns->series, date_of(from_c_time(end)), trading_days);
    *out = to_c(r.slice);
    if (truncated) *truncated = r.truncated ? 1 : 0;
  });
}

mkt_status mkt_returns_window_dates(const mkt_returns* returns, mkt_time first, mkt_time last,
                                    mkt_window* out) {
  return guard([&] {
    require(returns && out, "null argument");
    *out = to_c(slice_dates(returns->series, date_of(from_c_time(first)),
                            date_of(from_c_time(last))));
  });
}

/* ---- statistics ---- */

mkt_status mkt_summarize(const mkt_returns* returns, mkt_window window, mkt_summary* out) {
  return guard([&] {
    require(returns && out, "null argument");
    fill(summarize(returns->series, from_c(window)), out);
  });
}

mkt_status mkt_summary_write_csv(const mkt_summary_row* rows, size_t n, const char* path) {
  return guard([&] {
    require((rows || n == 0) && path, "null argument");
    std::vector<report::SummaryRow> out;
    for (size_t i = 0; i < n; ++i) {
      const auto& c = rows[i].stats;
      out.push_back({rows[i].instrument ? rows[i].instrument : "",
                     rows[i].window ? rows[i].window : "",
                     {c.count, c.mean, c.variance, c.std_dev, c.min, c.max, c.q1, c.median, c.q3,
                      c.skewness, c.kurtosis}});
    }
    write_file_atomic(path, report::summary_csv(out));
  });
}

mkt_status mkt_compare_write_csv(const mkt_compare_row* rows, size_t n, const char* path) {
  return guard([&] {
    require((rows || n == 0) && path, "null argument");
    std::vector<report::CompareRow> out;
    for (size_t i = 0; i < n; ++i) {
      const auto& e = rows[i].entropy;
      const auto& d = rows[i].std_dev;
      out.push_back({rows[i].instrument ? rows[i].instrument : "",
                     {"entropy", e.before, e.after, e.pct_difference},
                     {"std_dev", d.before, d.after, d.pct_difference}});
    }
    write_file_atomic(path, report::compare_csv(out));
  });
}

mkt_status mkt_summarize_values(const double* values, size_t n, mkt_summary* out) {
  return guard([&] {
    require((values || n == 0) && out, "null argument");
    fill(summarize(std::span<const double>(values, n)), out);
  });
}

mkt_status mkt_pct_difference(double before, double after, double* out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    *out = pct_difference(before, after);
  });
}

/* ---- entropy ---- */

size_t mkt_velleman_bins(size_t sample_count) { return velleman_bins(sample_count); }

mkt_status mkt_window_entropy(const mkt_returns* returns, mkt_window window,
                              const mkt_binning* binning, double* out) {
  return guard([&] {
    require(returns && out, "null argument");
    *out = window_entropy(returns->series, from_c(window), from_c(binning));
  });
}

mkt_status mkt_values_entropy(const double* values, size_t n, const mkt_binning* binning,
                              double* out) {
  return guard([&] {
    require((values || n == 0) && out, "null argument");
    *out = shannon_entropy(bin_returns(std::span<const double>(values, n), from_c(binning)));
  });
}

mkt_status mkt_compare_windows(const mkt_returns* returns, mkt_window before, mkt_window after,
                               mkt_metric metric, const mkt_binning* binning,
                               mkt_comparison* out) {
  return guard([&] {
    require(returns && out, "null argument");
    const Metric m = metric == MKT_METRIC_ENTROPY   ? Metric::Entropy
                     : metric == MKT_METRIC_STD_DEV ? Metric::StdDev
                                                    : Metric::Kurtosis;
    const BinningSpec spec =
        binning ? from_c(binning) : BinningSpec::per_window(velleman_bins(before.end - before.start));
    const auto c = compare_windows(returns->series, from_c(before), from_c(after), m, spec);
    *out = {c.before, c.after, c.pct_difference};
  });
}

mkt_status mkt_pmf_write_csv(const mkt_returns* returns, mkt_window window,
                             const mkt_binning* binning, const char* path, double* entropy) {
  return guard([&] {
    require(returns && path, "null argument");
    const auto dist = bin_returns(slice_values(returns->series, from_c(window)), from_c(binning));
    write_file_atomic(path, report::pmf_csv(dist));
    if (entropy) *entropy = shannon_entropy(dist);
  });
}

/* ---- cumulative entropy ---- */

mkt_sequence_spec mkt_sequence_defaults(mkt_frequency freq, size_t bars_per_day) {
  return to_c(freq == MKT_DAILY ? WindowSequenceSpec::for_daily()
                                : WindowSequenceSpec::for_intraday(bars_per_day));
}

mkt_detector mkt_detector_defaults(void) {
  const DetectorConfig d;
  return {d.theta, d.min_persistence, d.baseline};
}

mkt_status mkt_series_binning(const mkt_returns* returns, size_t base_length, size_t n_bins,
                              mkt_binning* out) {
  return guard([&] {
    require(returns && out, "null argument");
    const auto spec = series_binning(returns->series, base_length, n_bins);
    *out = {spec.n_bins(), spec.is_fixed() ? 1 : 0, spec.is_fixed() ? spec.range()->lo : 0.0,
            spec.is_fixed() ? spec.range()->hi : 0.0};
  });
}

mkt_status mkt_spectra_compute(const mkt_returns* returns, const mkt_sequence_spec* spec,
                               const mkt_binning* binning, unsigned threads, mkt_spectra** out) {
  return guard([&] {
    require(returns && out, "null argument");
    *out = nullptr;
    auto spectra = compute_spectra(returns->series, from_c(spec), from_c(binning), threads);
    *out = new mkt_spectra{std::move(spectra), returns->series.frequency()};
  });
}

size_t mkt_spectra_count(const mkt_spectra* spectra) {
  return spectra ? spectra->spectra.size() : 0;
}

size_t mkt_spectra_length(const mkt_spectra* spectra, size_t j) {
  return spectra && j < spectra->spectra.size() ? spectra->spectra[j].values.size() : 0;
}

const double* mkt_spectra_values(const mkt_spectra* spectra, size_t j) {
  return spectra && j < spectra->spectra.size() ? spectra->spectra[j].values.data() : nullptr;
}

mkt_status mkt_spectra_extent(const mkt_spectra* spectra, size_t j, mkt_window* out) {
  return guard([&] {
    require(spectra && out, "null argument");
    if (j >= spectra->spectra.size()) throw Error(ErrorCode::OutOfRange, "sequence index out of range");
    *out = {spectra->spectra[j].first_index, spectra->spectra[j].last_index};
  });
}

mkt_status mkt_spectra_write_csv(const mkt_spectra* spectra, const char* kind, const char* path) {
  return guard([&] {
    require(spectra && kind && path, "null argument");
    const std::string k = kind;
    std::string text;
    if (k == "spectrum") {
      text = report::spectrum_csv(spectra->spectra, spectra->frequency);
    } else if (k == "monthly") {
      text = report::monthly_csv(spectra->spectra);
    } else if (k == "daily_max") {
      text = report::daily_max_csv(spectra->spectra);
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown spectrum report kind '" + k + "'");
    }
    write_file_atomic(path, text);
  });
}

void mkt_spectra_free(mkt_spectra* spectra) { delete spectra; }

mkt_status mkt_detect_events(const mkt_spectra* spectra, const mkt_detector* config,
                             mkt_events** out) {
  return guard([&] {
    require(spectra && out, "null argument");
    *out = nullptr;
    DetectorConfig cfg;
    if (config) cfg = {config->theta, config->min_persistence, config->baseline};
    *out = new mkt_events{detect_events(spectra->spectra, cfg), spectra->frequency};
  });
}

size_t mkt_events_count(const mkt_events* events) { return events ? events->events.size() : 0; }

mkt_status mkt_events_get(const mkt_events* events, size_t i, mkt_event* out) {
  return guard([&] {
    require(events && out, "null argument");
    if (i >= events->events.size()) throw Error(ErrorCode::OutOfRange, "event index out of range");
    const auto& e = events->events[i];
    *out = {e.onset_index, to_c_time(e.onset_timestamp), e.peak_value, e.ramp_slope,
            e.persistence, e.last_index};
  });
}

mkt_status mkt_events_write_csv(const mkt_events* events, const char* path) {
  return guard([&] {
    require(events && path, "null argument");
    write_file_atomic(path, report::events_csv(events->events, events->frequency));
  });
}

void mkt_events_free(mkt_events* events) { delete events; }

/* ---- synthetic market ---- */

mkt_status mkt_synth_generate(const mkt_synth_spec* spec, mkt_prices** prices,
                              mkt_injections** injections) {
  return guard([&] {
    require(spec && prices, "null argument");
    require(spec->shocks != nullptr || spec->n_shocks == 0, "shocks is null");
    *prices = nullptr;
    if (injections) *injections = nullptr;
    SynthSpec s;
    s.seed = spec->seed;
    s.n_days = spec->n_days;
    s.bars_per_day = spec->bars_per_day;
    s.drift = spec->drift;
    s.volatility = spec->volatility;
    for (size_t i = 0; i < spec->n_shocks; ++i) {
      const auto& c = spec->shocks[i];
      s.shocks.push_back({c.day_index, c.magnitude_sigma,
                          c.shape == MKT_SHOCK_DISPERSED_DAY ? ShockShape::DispersedDay
                                                             : ShockShape::SingleBar});
    }
    if (spec->instrument_id) s.instrument_id = spec->instrument_id;
    if (spec->initial_price > 0.0) s.initial_price = spec->initial_price;
    if (spec->start_date != 0) s.start_date = date_of(from_c_time(spec->start_date));
    auto r = generate(s);
    const Frequency f = r.series.frequency();
    auto* p = new mkt_prices{std::move(r.series)};
    if (injections) {
      try {
        *injections = new mkt_injections{std::move(r.injections), f};
      } catch (...) {
        delete p;
        throw;
      }
    }
    *prices = p;
  });
}

size_t mkt_injections_count(const mkt_injections* injections) {
  return injections ? injections->log.size() : 0;
}

mkt_status mkt_injections_get(const mkt_injections* injections, size_t i, mkt_time* t,
                              size_t* bar_index, double* magnitude_sigma) {
  return guard([&] {
    require(injections != nullptr, "null argument");
    if (i >= injections->log.size()) throw Error(ErrorCode::OutOfRange, "injection index out of range");
    const auto& inj = injections->log[i];
    if (t) *t = to_c_time(inj.time);
    if (bar_index) *bar_index = inj.bar_index;
    if (magnitude_sigma) *magnitude_sigma = inj.magnitude_sigma;
  });
}

mkt_status mkt_injections_write_csv(const mkt_injections* injections, const char* path) {
  return guard([&] {
    require(injections && path, "null argument");
    write_file_atomic(path, report::injections_csv(injections->log, injections->frequency));
  });
}

void mkt_injections_free(mkt_injections* injections) { delete injections; }

}  // extern "C"
