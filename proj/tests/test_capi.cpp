// Exercises the shared library through the C header only.
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mktent.h"

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "mktent_capi_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(mkt_version()) > 0);
  CHECK(std::string(mkt_status_name(MKT_OK)) == "ok");
  CHECK(std::string(mkt_status_name(MKT_E_SERIES_TOO_SHORT)) == "SeriesTooShort");
}

TEST_CASE("parse, dedup and returns through handles") {
  const std::string csv =
      "Date,Close\n2025-01-02,100\n2025-01-03,101\nbad,5\n2025-01-06,-3\n2025-01-07,102\n";
  mkt_prices* prices = nullptr;
  mkt_ingest_diag diag{};
  REQUIRE(mkt_prices_parse_csv(csv.data(), csv.size(), MKT_DAILY, "X", nullptr, nullptr, &prices,
                               &diag) == MKT_OK);
  CHECK(diag.rows_read == 5);
  CHECK(diag.dropped == 2);
  CHECK(mkt_prices_size(prices) == 3);
  CHECK(std::string(mkt_prices_instrument(prices)) == "X");

  mkt_time t = 0;
  double close = 0;
  REQUIRE(mkt_prices_get(prices, 2, &t, &close) == MKT_OK);
  CHECK(close == 102.0);
  char buf[32];
  REQUIRE(mkt_format_time(t, MKT_DAILY, buf, sizeof buf) == MKT_OK);
  CHECK(std::string(buf) == "2025-01-07");
  CHECK(mkt_prices_get(prices, 3, &t, &close) == MKT_E_OUT_OF_RANGE);

  mkt_returns* rets = nullptr;
  REQUIRE(mkt_returns_compute(prices, MKT_LOG, &rets) == MKT_OK);
  REQUIRE(mkt_returns_size(rets) == 2);
  CHECK(mkt_returns_values(rets)[0] == doctest::Approx(std::log(1.01)));
  mkt_returns_free(rets);
  mkt_prices_free(prices);
}

TEST_CASE("errors set the status and the last error message") {
  mkt_prices* prices = nullptr;
  const std::string csv = "when,close\n2025-01-02,1\n";
  CHECK(mkt_prices_parse_csv(csv.data(), csv.size(), MKT_DAILY, "X", nullptr, nullptr, &prices,
                             nullptr) == MKT_E_MISSING_COLUMN);
  CHECK(prices == nullptr);
  CHECK(std::strlen(mkt_last_error()) > 0);

  CHECK(mkt_prices_parse_csv(csv.data(), csv.size(), MKT_DAILY, "X", nullptr, nullptr, nullptr,
                             nullptr) == MKT_E_INVALID_ARGUMENT);
  CHECK(mkt_prices_parse_csv(nullptr, 0, MKT_DAILY, "X", nullptr, nullptr, &prices, nullptr) ==
        MKT_E_EMPTY_INPUT);
  CHECK(mkt_prices_read_csv("/nonexistent/file.csv", MKT_DAILY, "X", nullptr, nullptr, &prices,
                            nullptr) == MKT_E_IO);
  double out = 0;
  CHECK(mkt_pct_difference(1.0, -1.0, &out) == MKT_E_DEGENERATE_DENOMINATOR);
  mkt_time d = 0;
  CHECK(mkt_parse_date("2025-13-01", &d) == MKT_E_INVALID_ARGUMENT);
}

TEST_CASE("synthetic series through spectra and events") {
  const mkt_shock shock{15, 10.0, MKT_SHOCK_DISPERSED_DAY};
  mkt_synth_spec spec{};
  spec.seed = 4242;
  spec.n_days = 20;
  spec.bars_per_day = 78;
  spec.volatility = 0.001;
  spec.shocks = &shock;
  spec.n_shocks = 1;

  mkt_prices* prices = nullptr;
  mkt_injections* inj = nullptr;
  REQUIRE(mkt_synth_generate(&spec, &prices, &inj) == MKT_OK);
  CHECK(mkt_prices_size(prices) == 20 * 78);
  CHECK(mkt_prices_bars_per_day(prices) == 78);
  CHECK(mkt_prices_frequency(prices) == MKT_FIVE_MINUTE);
  REQUIRE(mkt_injections_count(inj) == 1);
  mkt_time shock_time = 0;
  size_t bar = 0;
  double mag = 0;
  REQUIRE(mkt_injections_get(inj, 0, &shock_time, &bar, &mag) == MKT_OK);
  CHECK(bar == 15 * 78);

  mkt_returns* rets = nullptr;
  REQUIRE(mkt_returns_compute(prices, MKT_LOG, &rets) == MKT_OK);

  mkt_sequence_spec seq = mkt_sequence_defaults(MKT_FIVE_MINUTE, 78);
  CHECK(seq.steps == 13);
  seq.steps = 4;
  mkt_binning binning{};
  REQUIRE(mkt_series_binning(rets, seq.base_length, 0, &binning) == MKT_OK);
  CHECK(binning.n_bins == 18);
  CHECK(binning.fixed_range == 1);

  mkt_spectra* spectra = nullptr;
  REQUIRE(mkt_spectra_compute(rets, &seq, &binning, 2, &spectra) == MKT_OK);
  REQUIRE(mkt_spectra_count(spectra) == 15);
  CHECK(mkt_spectra_length(spectra, 0) == 5);
  CHECK(mkt_spectra_length(spectra, 99) == 0);

  const mkt_detector det = mkt_detector_defaults();
  mkt_events* events = nullptr;
  REQUIRE(mkt_detect_events(spectra, &det, &events) == MKT_OK);
  REQUIRE(mkt_events_count(events) == 1);
  mkt_event ev{};
  REQUIRE(mkt_events_get(events, 0, &ev) == MKT_OK);
  mkt_window extent{};
  REQUIRE(mkt_spectra_extent(spectra, ev.onset_index, &extent) == MKT_OK);
  CHECK(mkt_returns_time(rets, extent.start) <= shock_time);
  CHECK(shock_time <= mkt_returns_time(rets, extent.end - 1));

  const auto path = scratch("spectrum.csv");
  REQUIRE(mkt_spectra_write_csv(spectra, "spectrum", path.string().c_str()) == MKT_OK);
  CHECK(slurp(path).rfind("sequence_index,anchor_timestamp,k,window_len,H\n", 0) == 0);
  CHECK(mkt_spectra_write_csv(spectra, "bogus", path.string().c_str()) == MKT_E_INVALID_ARGUMENT);

  mkt_sequence_spec too_long = seq;
  too_long.steps = 40;
  mkt_spectra* none = nullptr;
  CHECK(mkt_spectra_compute(rets, &too_long, &binning, 1, &none) == MKT_E_SERIES_TOO_SHORT);

  mkt_events_free(events);
  mkt_spectra_free(spectra);
  mkt_returns_free(rets);
  mkt_injections_free(inj);
  mkt_prices_free(prices);
}

TEST_CASE("window entropy and comparisons") {
  const std::vector<double> v{0.0, 1.0, 2.0, 3.0};
  const mkt_binning b{4, 0, 0.0, 0.0};
  double h = 0;
  REQUIRE(mkt_values_entropy(v.data(), v.size(), &b, &h) == MKT_OK);
  CHECK(h == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(mkt_velleman_bins(100) == 20);

  mkt_summary s{};
  REQUIRE(mkt_summarize_values(v.data(), v.size(), &s) == MKT_OK);
  CHECK(s.mean == 1.5);
  CHECK(s.skewness == doctest::Approx(0.0));
  const double one = 1.0;
  CHECK(mkt_summarize_values(&one, 1, &s) == MKT_E_TOO_SHORT);
}

TEST_CASE("null handles are rejected or ignored") {
  CHECK(mkt_prices_size(nullptr) == 0);
  mkt_prices_free(nullptr);
  mkt_returns* r = nullptr;
  CHECK(mkt_returns_compute(nullptr, MKT_LOG, &r) == MKT_E_INVALID_ARGUMENT);
}
