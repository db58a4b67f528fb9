/* C interface to the mktent market-entropy library.
 *
 * Every object is an opaque handle released with its matching *_free
 * function. Functions return an mkt_status; on failure a description is
 * available from mkt_last_error() on the calling thread. Handles are
 * immutable after creation and may be shared between threads. */
#ifndef MKTENT_H_
#define MKTENT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MKTENT_BUILDING)
#    define MKT_API __declspec(dllexport)
#  else
#    define MKT_API __declspec(dllimport)
#  endif
#else
#  define MKT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mkt_status {
  MKT_OK = 0,
  MKT_E_INVALID_ARGUMENT = 1,
  MKT_E_MISSING_COLUMN = 2,
  MKT_E_EMPTY_INPUT = 3,
  MKT_E_AMBIGUOUS_TIMESTAMP = 4,
  MKT_E_TOO_SHORT = 5,
  MKT_E_OUT_OF_RANGE = 6,
  MKT_E_EMPTY_WINDOW = 7,
  MKT_E_DEGENERATE_DENOMINATOR = 8,
  MKT_E_SERIES_TOO_SHORT = 9,
  MKT_E_INSUFFICIENT_BASELINE = 10,
  MKT_E_IO = 11,
  MKT_E_INTERNAL = 99
} mkt_status;

typedef enum mkt_frequency { MKT_DAILY = 0, MKT_FIVE_MINUTE = 1 } mkt_frequency;
typedef enum mkt_return_kind { MKT_NOMINAL = 0, MKT_LOG = 1 } mkt_return_kind;
typedef enum mkt_metric { MKT_METRIC_ENTROPY = 0, MKT_METRIC_STD_DEV = 1, MKT_METRIC_KURTOSIS = 2 } mkt_metric;
typedef enum mkt_anchor_mode { MKT_GROW_RIGHT = 0, MKT_GROW_LEFT = 1 } mkt_anchor_mode;
typedef enum mkt_shock_shape { MKT_SHOCK_SINGLE_BAR = 0, MKT_SHOCK_DISPERSED_DAY = 1 } mkt_shock_shape;

typedef struct mkt_prices mkt_prices;
typedef struct mkt_returns mkt_returns;
typedef struct mkt_spectra mkt_spectra;
typedef struct mkt_events mkt_events;
typedef struct mkt_injections mkt_injections;

/* Seconds since 1970-01-01T00:00:00, zone-less. */
typedef int64_t mkt_time;

MKT_API const char* mkt_version(void);
MKT_API const char* mkt_last_error(void);
MKT_API const char* mkt_status_name(mkt_status status);

/* Writes a NUL-terminated "YYYY-MM-DD" (daily) or "YYYY-MM-DD HH:MM:SS".
 * Returns MKT_E_INVALID_ARGUMENT if cap is too small (needs 20 bytes). */
MKT_API mkt_status mkt_format_time(mkt_time t, mkt_frequency freq, char* buf, size_t cap);
/* Parses "YYYY-MM-DD" into midnight of that date. */
MKT_API mkt_status mkt_parse_date(const char* text, mkt_time* out);

/* ---- ingest ---------------------------------------------------------- */

typedef struct mkt_ingest_diag {
  size_t rows_read;
  size_t bad_timestamp;
  size_t bad_price;
  size_t duplicate_timestamp;
  size_t dropped; /* sum of the three counters above */
} mkt_ingest_diag;

/* dt_col/close_col may be NULL for the defaults "timestamp"/"close". */
MKT_API mkt_status mkt_prices_parse_csv(const char* text, size_t len, mkt_frequency freq,
                                        const char* instrument_id, const char* dt_col,
                                        const char* close_col, mkt_prices** out,
                                        mkt_ingest_diag* diag);
MKT_API mkt_status mkt_prices_read_csv(const char* path, mkt_frequency freq,
                                       const char* instrument_id, const char* dt_col,
                                       const char* close_col, mkt_prices** out,
                                       mkt_ingest_diag* diag);
/* Writes the normalized "timestamp,close" form. */
MKT_API mkt_status mkt_prices_write_csv(const mkt_prices* prices, const char* path);

/* Drops closed-market padding: runs of identical closes longer than
 * run_threshold keep their first point. removed may be NULL. */
MKT_API mkt_status mkt_prices_dedup(const mkt_prices* prices, size_t run_threshold,
                                    mkt_prices** out, size_t* removed);
MKT_API mkt_status mkt_prices_aggregate_daily(const mkt_prices* prices, mkt_prices** out);

MKT_API size_t mkt_prices_size(const mkt_prices* prices);
MKT_API mkt_frequency mkt_prices_frequency(const mkt_prices* prices);
MKT_API const char* mkt_prices_instrument(const mkt_prices* prices);
MKT_API mkt_status mkt_prices_get(const mkt_prices* prices, size_t i, mkt_time* t, double* close);
/* Median number of observations per calendar date. */
MKT_API size_t mkt_prices_bars_per_day(const mkt_prices* prices);
MKT_API void mkt_prices_free(mkt_prices* prices);

/* ---- returns ---------------------------------------------------------- */

typedef struct mkt_window {
  size_t start; /* inclusive */
  size_t end;   /* exclusive */
} mkt_window;

MKT_API mkt_status mkt_returns_compute(const mkt_prices* prices, mkt_return_kind kind,
                                       mkt_returns** out);
MKT_API size_t mkt_returns_size(const mkt_returns* returns);
/* Borrowed view, valid for the lifetime of the handle. */
MKT_API const double* mkt_returns_values(const mkt_returns* returns);
MKT_API mkt_time mkt_returns_time(const mkt_returns* returns, size_t i);
MKT_API void mkt_returns_free(mkt_returns* returns);
/* Copy of the observations in window, e.g. for a date-range filter. */
MKT_API mkt_status mkt_returns_subset(const mkt_returns* returns, mkt_window window,
                                      mkt_returns** out);

/* First trading_days dates at or after start. *truncated (may be NULL) is set
 * to 1 when fewer dates were available. */
MKT_API mkt_status mkt_returns_window_from(const mkt_returns* returns, mkt_time start,
                                           size_t trading_days, mkt_window* out, int* truncated);
/* Last trading_days dates strictly before end. */
MKT_API mkt_status mkt_returns_window_before(const mkt_returns* returns, mkt_time end,
                                             size_t trading_days, mkt_window* out,
                                             int* truncated);
/* All observations dated within [first, last] (dates, inclusive). */
MKT_API mkt_status mkt_returns_window_dates(const mkt_returns* returns, mkt_time first,
                                            mkt_time last, mkt_window* out);

/* ---- statistics ------------------------------------------------------- */

typedef struct mkt_summary {
  size_t count;
  double mean, variance, std_dev, min, max, q1, median, q3;
  double skewness; /* NaN when undefined */
  double kurtosis; /* excess; NaN when undefined */
} mkt_summary;

typedef struct mkt_comparison {
  double before;
  double after;
  double pct_difference; /* signed fraction */
} mkt_comparison;

MKT_API mkt_status mkt_summarize(const mkt_returns* returns, mkt_window window, mkt_summary* out);
MKT_API mkt_status mkt_summarize_values(const double* values, size_t n, mkt_summary* out);
MKT_API mkt_status mkt_pct_difference(double before, double after, double* out);

typedef struct mkt_summary_row {
  const char* instrument;
  const char* window;
  mkt_summary stats;
} mkt_summary_row;

typedef struct mkt_compare_row {
  const char* instrument;
  mkt_comparison entropy;
  mkt_comparison std_dev;
} mkt_compare_row;

/* "instrument,window,count,mean,min,max,skewness,kurtosis,variance,std_dev,q1,median,q3" */
MKT_API mkt_status mkt_summary_write_csv(const mkt_summary_row* rows, size_t n, const char* path);
/* "instrument,entropy_before,entropy_after,entropy_pct_diff,std_before,std_after,std_pct_diff" */
MKT_API mkt_status mkt_compare_write_csv(const mkt_compare_row* rows, size_t n, const char* path);

/* ---- entropy ---------------------------------------------------------- */

typedef struct mkt_binning {
  size_t n_bins;
  int fixed_range; /* 0: each window uses its own [min, max] */
  double lo, hi;
} mkt_binning;

MKT_API size_t mkt_velleman_bins(size_t sample_count);
MKT_API mkt_status mkt_window_entropy(const mkt_returns* returns, mkt_window window,
                                      const mkt_binning* binning, double* out);
MKT_API mkt_status mkt_values_entropy(const double* values, size_t n,
                                      const mkt_binning* binning, double* out);
/* metric evaluated on both windows; binning only used for entropy. */
MKT_API mkt_status mkt_compare_windows(const mkt_returns* returns, mkt_window before,
                                       mkt_window after, mkt_metric metric,
                                       const mkt_binning* binning, mkt_comparison* out);
/* Writes "bin_lo,bin_hi,mass" for the window; entropy (may be NULL) receives H. */
MKT_API mkt_status mkt_pmf_write_csv(const mkt_returns* returns, mkt_window window,
                                     const mkt_binning* binning, const char* path,
                                     double* entropy);

/* ---- cumulative entropy ----------------------------------------------- */

typedef struct mkt_sequence_spec {
  size_t base_length;
  size_t increment;
  size_t steps;
  size_t stride;
  size_t sequence_count; /* 0 fills the series */
  mkt_anchor_mode anchor_mode;
} mkt_sequence_spec;

typedef struct mkt_detector {
  double theta;
  size_t min_persistence;
  size_t baseline;
} mkt_detector;

typedef struct mkt_event {
  size_t onset_index;
  mkt_time onset_time;
  double peak_value;
  double ramp_slope;
  size_t persistence;
  size_t last_index;
} mkt_event;

MKT_API mkt_sequence_spec mkt_sequence_defaults(mkt_frequency freq, size_t bars_per_day);
MKT_API mkt_detector mkt_detector_defaults(void);

/* Fixed binning over the whole series' [min, max]; n_bins 0 picks
 * mkt_velleman_bins(base_length). */
MKT_API mkt_status mkt_series_binning(const mkt_returns* returns, size_t base_length,
                                      size_t n_bins, mkt_binning* out);

/* threads 0 = hardware concurrency. */
MKT_API mkt_status mkt_spectra_compute(const mkt_returns* returns, const mkt_sequence_spec* spec,
                                       const mkt_binning* binning, unsigned threads,
                                       mkt_spectra** out);
MKT_API size_t mkt_spectra_count(const mkt_spectra* spectra);
/* Number of values (m + 1) in spectrum j, or 0 if j is out of range. */
MKT_API size_t mkt_spectra_length(const mkt_spectra* spectra, size_t j);
MKT_API const double* mkt_spectra_values(const mkt_spectra* spectra, size_t j);
MKT_API mkt_status mkt_spectra_extent(const mkt_spectra* spectra, size_t j, mkt_window* out);
/* kind: "spectrum", "monthly" or "daily_max". */
MKT_API mkt_status mkt_spectra_write_csv(const mkt_spectra* spectra, const char* kind,
                                         const char* path);
MKT_API void mkt_spectra_free(mkt_spectra* spectra);

MKT_API mkt_status mkt_detect_events(const mkt_spectra* spectra, const mkt_detector* config,
                                     mkt_events** out);
MKT_API size_t mkt_events_count(const mkt_events* events);
MKT_API mkt_status mkt_events_get(const mkt_events* events, size_t i, mkt_event* out);
MKT_API mkt_status mkt_events_write_csv(const mkt_events* events, const char* path);
MKT_API void mkt_events_free(mkt_events* events);

/* ---- synthetic market ------------------------------------------------- */

typedef struct mkt_shock {
  size_t day_index;
  double magnitude_sigma;
  mkt_shock_shape shape;
} mkt_shock;

typedef struct mkt_synth_spec {
  uint64_t seed;
  size_t n_days;
  size_t bars_per_day;
  double drift;      /* per bar */
  double volatility; /* per bar */
  const mkt_shock* shocks;
  size_t n_shocks;
  const char* instrument_id; /* NULL: "SYNTH" */
  double initial_price;      /* <= 0: 100 */
  mkt_time start_date;       /* 0: 2025-01-02 */
} mkt_synth_spec;

MKT_API mkt_status mkt_synth_generate(const mkt_synth_spec* spec, mkt_prices** prices,
                                      mkt_injections** injections);
MKT_API size_t mkt_injections_count(const mkt_injections* injections);
MKT_API mkt_status mkt_injections_get(const mkt_injections* injections, size_t i, mkt_time* t,
                                      size_t* bar_index, double* magnitude_sigma);
MKT_API mkt_status mkt_injections_write_csv(const mkt_injections* injections, const char* path);
MKT_API void mkt_injections_free(mkt_injections* injections);

#ifdef __cplusplus
}
#endif

#endif /* MKTENT_H_ */
