#include <cmath>

#include "doctest.h"
#include "mktent/csv.hpp"
#include "mktent/report.hpp"
#include "mktent/returns.hpp"
#include "mktent/timestamp.hpp"

using namespace mktent;

namespace {

csv::Table reparse(const std::string& text, std::size_t columns) {
  auto t = csv::parse(text);
  for (const auto& row : t.rows) REQUIRE(row.size() == columns);
  return t;
}

}  // namespace

TEST_CASE("spectrum, events, monthly and daily reports round-trip") {
  SynthSpec s;
  s.n_days = 30;
  s.seed = 8;
  s.shocks = {{20, 10.0, ShockShape::DispersedDay}};
  const auto r = log_returns(generate(s).series);
  const WindowSequenceSpec seq{78, 78, 4, 78, std::nullopt, AnchorMode::GrowRight};
  const auto spectra = compute_spectra(r, seq, series_binning(r, 78));
  const auto events = detect_events(spectra);

  const auto sp = reparse(report::spectrum_csv(spectra, r.frequency()), 5);
  CHECK(sp.header == std::vector<std::string>{"sequence_index", "anchor_timestamp", "k",
                                              "window_len", "H"});
  REQUIRE(sp.rows.size() == spectra.size() * 5);
  for (std::size_t i = 0; i < sp.rows.size(); ++i) {
    const auto& sref = spectra[i / 5];
    CHECK(std::stoul(sp.rows[i][0]) == sref.sequence_index);
    CHECK(parse_timestamp(sp.rows[i][1])->time == sref.anchor_timestamp);
    CHECK(std::stoul(sp.rows[i][3]) == sref.window_lengths[i % 5]);
    CHECK(std::abs(*csv::parse_real(sp.rows[i][4]) - sref.values[i % 5]) <= 5e-7);
  }

  const auto ev = reparse(report::events_csv(events, r.frequency()), 4);
  CHECK(ev.header.front() == "onset_timestamp");
  CHECK(ev.rows.size() == events.size());

  const auto mo = reparse(report::monthly_csv(spectra), 4);
  std::size_t total = 0;
  for (const auto& row : mo.rows) {
    CHECK(row[0].size() == 7);
    total += std::stoul(row[1]);
  }
  CHECK(total == spectra.size());

  const auto dm = reparse(report::daily_max_csv(spectra), 3);
  CHECK(dm.rows.size() == spectra.size());
  CHECK(dm.header == std::vector<std::string>{"date", "sequences", "max_H"});
}

TEST_CASE("summary and compare reports") {
  const auto st = summarize(std::vector<double>{1, 2, 3});
  const std::vector<report::SummaryRow> rows{{"X", "before", st}};
  const auto t = reparse(report::summary_csv(rows), 13);
  CHECK(t.rows[0][2] == "3");
  CHECK(t.rows[0][3] == "2.000000");
  CHECK(t.rows[0][7] == "nan");

  const std::vector<report::CompareRow> cmp{
      {"SPX", {"entropy", 1.465, 1.099, pct_difference(1.465, 1.099)},
       {"std_dev", 0.008, 0.008, 0.0}}};
  const auto c = reparse(report::compare_csv(cmp), 7);
  CHECK(c.rows[0][3] == "-0.285491");
}

TEST_CASE("injections and pmf reports") {
  SynthSpec s;
  s.shocks = {{3, 10.0, ShockShape::SingleBar}, {5, 10.0, ShockShape::DispersedDay}};
  const auto g = generate(s);
  const auto t = reparse(report::injections_csv(g.injections, Frequency::FiveMinute), 3);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "2025-01-07 12:45:00");
  CHECK(t.rows[0][2] == "single_bar");
  CHECK(t.rows[1][0] == "2025-01-09 09:30:00");
  CHECK(t.rows[1][2] == "dispersed_day");

  const std::vector<double> v{0.0, 1.0, 2.0, 3.0};
  const auto dist = bin_returns(v, BinningSpec::per_window(2));
  const auto p = reparse(report::pmf_csv(dist), 3);
  REQUIRE(p.rows.size() == 2);
  CHECK(p.rows[0][0] == "0.000000");
  CHECK(p.rows[1][1] == "3.000000");
  CHECK(p.rows[1][2] == "0.500000");
}
