#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mktent.h"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInsufficient = 3;

struct Failure : std::runtime_error {
  Failure(const std::string& what, int code) : std::runtime_error(what), exit_code(code) {}
  int exit_code;
};

int exit_code_for(mkt_status s) {
  switch (s) {
    case MKT_E_SERIES_TOO_SHORT:
    case MKT_E_INSUFFICIENT_BASELINE:
    case MKT_E_TOO_SHORT:
      return kExitInsufficient;
    default:
      return kExitInput;
  }
}

void check(mkt_status s, const std::string& context) {
  if (s != MKT_OK) {
    throw Failure(context + ": " + mkt_status_name(s) + ": " + mkt_last_error(), exit_code_for(s));
  }
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Prices = std::unique_ptr<mkt_prices, Deleter<mkt_prices, mkt_prices_free>>;
using Returns = std::unique_ptr<mkt_returns, Deleter<mkt_returns, mkt_returns_free>>;
using Spectra = std::unique_ptr<mkt_spectra, Deleter<mkt_spectra, mkt_spectra_free>>;
using Events = std::unique_ptr<mkt_events, Deleter<mkt_events, mkt_events_free>>;
using Injections = std::unique_ptr<mkt_injections, Deleter<mkt_injections, mkt_injections_free>>;

struct Instrument {
  std::string id;
  fs::path csv;
  std::string frequency;  // empty: use the run-wide setting
};

struct ShockArg {
  std::size_t day = 0;
  double magnitude = 10.0;
  mkt_shock_shape shape = MKT_SHOCK_DISPERSED_DAY;
};

// Effective run settings: defaults, then the config file, then flags.
struct Settings {
  fs::path out = ".";
  std::vector<Instrument> instruments;
  std::string dt_col;
  std::string close_col;
  std::string frequency = "auto";
  std::string returns = "log";
  std::size_t bins = 0;  // 0: Velleman
  double theta = 3.0;
  std::size_t persistence = 2;
  std::size_t baseline = 8;
  unsigned threads = 0;
  std::size_t dedup_run = 6;

  std::string anchor_date = "2025-01-20";
  std::size_t before_days = 70;
  std::size_t after_days = 70;

  std::optional<std::size_t> base_length, increment, steps, stride, sequence_count;
  std::string anchor_mode = "right";
  std::string range = "series";
  std::string from, to;

  std::string pmf_instrument;
  std::string day;
  std::size_t span_days = 15;

  std::uint64_t seed = 1;
  std::size_t days = 20;
  std::size_t bars_per_day = 78;
  double drift = 0.0;
  double volatility = 0.001;
  std::size_t count = 1;
  std::string synth_id = "SYNTH";
  std::string start_date = "2025-01-02";
  std::vector<ShockArg> shocks;
};

// Flag targets. Unset optionals leave the config value alone.
struct Flags {
  std::string config;
  std::optional<std::string> out, dt_col, close_col, frequency, returns;
  std::optional<std::size_t> bins, persistence, baseline, dedup_run;
  std::optional<double> theta;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> files;

  std::optional<std::string> anchor_date;
  std::optional<std::size_t> before_days, after_days;

  std::optional<std::size_t> base_length, increment, steps, stride, sequence_count;
  std::optional<std::string> anchor_mode, range, from, to;

  std::optional<std::string> pmf_instrument, day;
  std::optional<std::size_t> span_days;

  std::optional<std::size_t> days, bars_per_day, count;
  std::optional<double> drift, volatility;
  std::optional<std::string> synth_id, start_date;
  std::vector<std::string> shocks;
};

ShockArg parse_shock(const std::string& text) {
  // DAY[:MAGNITUDE[:SHAPE]]
  ShockArg s;
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = text.find(':', pos);
    parts.push_back(text.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  try {
    if (parts.empty() || parts.size() > 3) throw std::invalid_argument("arity");
    s.day = std::stoul(parts[0]);
    if (parts.size() > 1) s.magnitude = std::stod(parts[1]);
  } catch (const std::exception&) {
    throw Failure("bad shock '" + text + "', expected DAY[:MAGNITUDE[:SHAPE]]", kExitInput);
  }
  if (parts.size() > 2) {
    if (parts[2] == "single" || parts[2] == "single_bar") {
      s.shape = MKT_SHOCK_SINGLE_BAR;
    } else if (parts[2] == "dispersed" || parts[2] == "dispersed_day") {
      s.shape = MKT_SHOCK_DISPERSED_DAY;
    } else {
      throw Failure("bad shock shape '" + parts[2] + "'", kExitInput);
    }
  }
  return s;
}

template <typename T>
void take(const json& j, const char* key, T& target) {
  if (j.contains(key) && !j.at(key).is_null()) target = j.at(key).get<T>();
}

template <typename T>
void take(const json& j, const char* key, std::optional<T>& target) {
  if (j.contains(key) && !j.at(key).is_null()) target = j.at(key).get<T>();
}

void load_config(const fs::path& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw Failure("cannot open config " + path.string(), kExitInput);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Failure("config " + path.string() + ": " + e.what(), kExitInput);
  }
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  try {
    if (j.contains("out")) s.out = resolve(j.at("out").get<std::string>());
    take(j, "dt_col", s.dt_col);
    take(j, "close_col", s.close_col);
    take(j, "frequency", s.frequency);
    take(j, "returns", s.returns);
    take(j, "bins", s.bins);
    take(j, "theta", s.theta);
    take(j, "persistence", s.persistence);
    take(j, "baseline", s.baseline);
    take(j, "threads", s.threads);
    take(j, "dedup_run", s.dedup_run);
    take(j, "seed", s.seed);
    take(j, "anchor_date", s.anchor_date);
    take(j, "before_days", s.before_days);
    take(j, "after_days", s.after_days);
    take(j, "range", s.range);
    take(j, "from", s.from);
    take(j, "to", s.to);
    if (j.contains("sequence")) {
      const auto& q = j.at("sequence");
      take(q, "base_length", s.base_length);
      take(q, "increment", s.increment);
      take(q, "steps", s.steps);
      take(q, "stride", s.stride);
      take(q, "count", s.sequence_count);
      take(q, "anchor_mode", s.anchor_mode);
    }
    if (j.contains("pmf")) {
      const auto& q = j.at("pmf");
      take(q, "instrument", s.pmf_instrument);
      take(q, "day", s.day);
      take(q, "span_days", s.span_days);
    }
    if (j.contains("synth")) {
      const auto& q = j.at("synth");
      take(q, "days", s.days);
      take(q, "bars_per_day", s.bars_per_day);
      take(q, "drift", s.drift);
      take(q, "volatility", s.volatility);
      take(q, "instruments", s.count);
      take(q, "id", s.synth_id);
      take(q, "start", s.start_date);
      if (q.contains("shocks")) {
        for (const auto& sh : q.at("shocks")) {
          ShockArg a;
          take(sh, "day", a.day);
          take(sh, "magnitude", a.magnitude);
          std::string shape = "dispersed_day";
          take(sh, "shape", shape);
          a.shape = parse_shock("0:1:" + shape).shape;
          s.shocks.push_back(a);
        }
      }
    }
    if (j.contains("instruments")) {
      for (const auto& i : j.at("instruments")) {
        Instrument inst;
        inst.id = i.at("id").get<std::string>();
        inst.csv = resolve(i.at("csv").get<std::string>());
        take(i, "frequency", inst.frequency);
        s.instruments.push_back(std::move(inst));
      }
    }
  } catch (const json::exception& e) {
    throw Failure("config " + path.string() + ": " + e.what(), kExitInput);
  }
}

template <typename T>
void apply(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

template <typename T>
void apply(const std::optional<T>& flag, std::optional<T>& target) {
  if (flag) target = flag;
}

Settings resolve_settings(const Flags& f) {
  Settings s;
  if (!f.config.empty()) load_config(f.config, s);
  if (f.out) s.out = *f.out;
  apply(f.dt_col, s.dt_col);
  apply(f.close_col, s.close_col);
  apply(f.frequency, s.frequency);
  apply(f.returns, s.returns);
  apply(f.bins, s.bins);
  apply(f.theta, s.theta);
  apply(f.persistence, s.persistence);
  apply(f.baseline, s.baseline);
  apply(f.threads, s.threads);
  apply(f.dedup_run, s.dedup_run);
  apply(f.seed, s.seed);
  apply(f.anchor_date, s.anchor_date);
  apply(f.before_days, s.before_days);
  apply(f.after_days, s.after_days);
  apply(f.base_length, s.base_length);
  apply(f.increment, s.increment);
  apply(f.steps, s.steps);
  apply(f.stride, s.stride);
  apply(f.sequence_count, s.sequence_count);
  apply(f.anchor_mode, s.anchor_mode);
  apply(f.range, s.range);
  apply(f.from, s.from);
  apply(f.to, s.to);
  apply(f.pmf_instrument, s.pmf_instrument);
  apply(f.day, s.day);
  apply(f.span_days, s.span_days);
  apply(f.days, s.days);
  apply(f.bars_per_day, s.bars_per_day);
  apply(f.count, s.count);
  apply(f.drift, s.drift);
  apply(f.volatility, s.volatility);
  apply(f.synth_id, s.synth_id);
  apply(f.start_date, s.start_date);
  if (!f.shocks.empty()) {
    s.shocks.clear();
    for (const auto& t : f.shocks) s.shocks.push_back(parse_shock(t));
  }
  for (const auto& file : f.files) s.instruments.push_back({fs::path(file).stem().string(), file, {}});
  return s;
}

mkt_time parse_date(const std::string& text, const char* what) {
  mkt_time t = 0;
  if (mkt_parse_date(text.c_str(), &t) != MKT_OK) {
    throw Failure(std::string("bad ") + what + " '" + text + "'", kExitInput);
  }
  return t;
}

std::string format_time(mkt_time t, mkt_frequency freq) {
  char buf[32];
  check(mkt_format_time(t, freq, buf, sizeof buf), "format");
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string out_path(const Settings& s, const std::string& id, const char* suffix) {
  return (s.out / (id + suffix)).string();
}

struct Loaded {
  Prices prices;
  mkt_ingest_diag diag{};
};

Loaded load(const Instrument& inst, const Settings& s) {
  const std::string freq = inst.frequency.empty() ? s.frequency : inst.frequency;
  if (!fs::exists(inst.csv)) throw Failure(inst.csv.string() + ": no such file", kExitInput);
  auto read = [&](mkt_frequency f, Loaded& l) {
    mkt_prices* p = nullptr;
    const auto st = mkt_prices_read_csv(inst.csv.string().c_str(), f, inst.id.c_str(),
                                        s.dt_col.c_str(), s.close_col.c_str(), &p, &l.diag);
    l.prices.reset(p);
    return st;
  };
  Loaded l;
  mkt_status st;
  if (freq == "auto") {
    st = read(MKT_FIVE_MINUTE, l);
    if (st == MKT_E_AMBIGUOUS_TIMESTAMP) st = read(MKT_DAILY, l);
  } else if (freq == "daily") {
    st = read(MKT_DAILY, l);
  } else if (freq == "5min" || freq == "five_minute") {
    st = read(MKT_FIVE_MINUTE, l);
  } else {
    throw Failure("unknown frequency '" + freq + "'", kExitInput);
  }
  check(st, inst.csv.string());
  return l;
}

Returns compute_returns(const mkt_prices* p, const Settings& s, const std::string& id) {
  mkt_return_kind kind;
  if (s.returns == "log") {
    kind = MKT_LOG;
  } else if (s.returns == "nominal") {
    kind = MKT_NOMINAL;
  } else {
    throw Failure("unknown return kind '" + s.returns + "'", kExitInput);
  }
  mkt_returns* r = nullptr;
  check(mkt_returns_compute(p, kind, &r), id + ": returns");
  return Returns(r);
}

struct Outcome {
  int code = kExitOk;
  std::string out;  // stdout lines
  std::string err;  // stderr lines
};

// Runs fn(i) for every item on a small pool; results stay in item order.
template <typename Fn>
std::vector<Outcome> run_all(std::size_t n, unsigned threads, Fn fn) {
  std::vector<Outcome> results(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = fn(i);
      } catch (const Failure& e) {
        results[i] = {e.exit_code, {}, std::string("error: ") + e.what() + "\n"};
      } catch (const std::exception& e) {
        results[i] = {kExitInput, {}, std::string("error: ") + e.what() + "\n"};
      }
    }
  };
  unsigned hw = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  hw = static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(n, 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < hw; ++t) pool.emplace_back(worker);
    worker();
  }
  return results;
}

int report(const std::vector<Outcome>& results) {
  int code = kExitOk;
  for (const auto& r : results) {
    std::cout << r.out;
    std::cerr << r.err;
    code = std::max(code, r.code);
  }
  return code;
}

void require_instruments(const Settings& s) {
  if (s.instruments.empty()) {
    throw Failure("no instruments given (pass CSV files or a config with \"instruments\")",
                  kExitInput);
  }
}

void ensure_out(const Settings& s) {
  std::error_code ec;
  fs::create_directories(s.out, ec);
  if (ec) throw Failure("cannot create " + s.out.string() + ": " + ec.message(), kExitInput);
}

int cmd_ingest(const Settings& s) {
  require_instruments(s);
  struct Staged {
    Prices prices;
    mkt_ingest_diag diag{};
    std::size_t removed = 0;
  };
  std::vector<Staged> staged(s.instruments.size());

  // Parse everything first so a bad file leaves no outputs behind.
  auto parsed = run_all(s.instruments.size(), s.threads, [&](std::size_t i) {
    const auto& inst = s.instruments[i];
    auto l = load(inst, s);
    mkt_prices* clean = nullptr;
    check(mkt_prices_dedup(l.prices.get(), s.dedup_run, &clean, &staged[i].removed),
          inst.id + ": dedup");
    staged[i].prices.reset(clean);
    staged[i].diag = l.diag;
    return Outcome{};
  });
  if (report(parsed) != kExitOk) return kExitInput;

  ensure_out(s);
  auto written = run_all(s.instruments.size(), s.threads, [&](std::size_t i) {
    const auto& inst = s.instruments[i];
    const auto& st = staged[i];
    const auto path = out_path(s, inst.id, ".csv");
    check(mkt_prices_write_csv(st.prices.get(), path.c_str()), inst.id + ": write");
    Outcome o;
    o.out = inst.id + ": rows=" + std::to_string(st.diag.rows_read) +
            " kept=" + std::to_string(mkt_prices_size(st.prices.get())) +
            " dropped=" + std::to_string(st.diag.dropped) +
            " dedup_removed=" + std::to_string(st.removed) + " -> " + path + "\n";
    return o;
  });
  const int code = report(written);
  std::size_t dropped = 0;
  for (const auto& st : staged) dropped += st.diag.dropped;
  std::cout << "ingested " << s.instruments.size() << " file(s), dropped=" << dropped << "\n";
  return code == kExitOk ? kExitOk : kExitInput;
}

int cmd_compare(const Settings& s) {
  require_instruments(s);
  const mkt_time anchor = parse_date(s.anchor_date, "anchor date");
  struct Row {
    bool ok = false;
    mkt_comparison entropy{};
    mkt_comparison std_dev{};
    mkt_summary before{};
    mkt_summary after{};
  };
  std::vector<Row> rows(s.instruments.size());

  auto results = run_all(s.instruments.size(), s.threads, [&](std::size_t i) {
    const auto& inst = s.instruments[i];
    const auto l = load(inst, s);
    const auto r = compute_returns(l.prices.get(), s, inst.id);
    Outcome o;
    mkt_window before{}, after{};
    int truncated = 0;
    check(mkt_returns_window_before(r.get(), anchor, s.before_days, &before, &truncated),
          inst.id + ": before window");
    if (truncated) o.err += "warning: " + inst.id + ": before window truncated to available data\n";
    check(mkt_returns_window_from(r.get(), anchor, s.after_days, &after, &truncated),
          inst.id + ": after window");
    if (truncated) o.err += "warning: " + inst.id + ": after window truncated to available data\n";

    const mkt_binning per_window{s.bins, 0, 0.0, 0.0};
    const mkt_binning* binning = s.bins ? &per_window : nullptr;
    auto& row = rows[i];
    check(mkt_compare_windows(r.get(), before, after, MKT_METRIC_ENTROPY, binning, &row.entropy),
          inst.id + ": entropy");
    check(mkt_compare_windows(r.get(), before, after, MKT_METRIC_STD_DEV, binning, &row.std_dev),
          inst.id + ": std_dev");
    check(mkt_summarize(r.get(), before, &row.before), inst.id + ": summary");
    check(mkt_summarize(r.get(), after, &row.after), inst.id + ": summary");
    row.ok = true;
    o.out = inst.id + ": entropy " + fmt6(row.entropy.before) + " -> " + fmt6(row.entropy.after) +
            ", std_dev " + fmt6(row.std_dev.before) + " -> " + fmt6(row.std_dev.after) + "\n";
    return o;
  });
  const int code = report(results);

  std::vector<mkt_compare_row> cmp;
  std::vector<mkt_summary_row> summary;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok) continue;
    const char* id = s.instruments[i].id.c_str();
    cmp.push_back({id, rows[i].entropy, rows[i].std_dev});
    summary.push_back({id, "before", rows[i].before});
    summary.push_back({id, "after", rows[i].after});
  }
  if (cmp.empty()) return code;
  ensure_out(s);
  const auto cmp_path = (s.out / "compare.csv").string();
  const auto sum_path = (s.out / "summary.csv").string();
  check(mkt_compare_write_csv(cmp.data(), cmp.size(), cmp_path.c_str()), "compare.csv");
  check(mkt_summary_write_csv(summary.data(), summary.size(), sum_path.c_str()), "summary.csv");
  std::cout << "wrote " << cmp_path << " (" << cmp.size() << " of " << rows.size()
            << " instruments)\n";
  return kExitOk;
}

mkt_anchor_mode anchor_mode(const std::string& text) {
  if (text == "right" || text == "grow_right") return MKT_GROW_RIGHT;
  if (text == "left" || text == "grow_left") return MKT_GROW_LEFT;
  throw Failure("unknown anchor mode '" + text + "'", kExitInput);
}

int cmd_spectrum(const Settings& s) {
  require_instruments(s);
  if (s.range != "series" && s.range != "window") {
    throw Failure("unknown range '" + s.range + "', expected series or window", kExitInput);
  }
  const mkt_anchor_mode mode = anchor_mode(s.anchor_mode);
  const mkt_detector detector{s.theta, s.persistence, s.baseline};
  const unsigned hw = s.threads ? s.threads : std::max(1u, std::thread::hardware_concurrency());
  const unsigned inner =
      std::max<unsigned>(1, hw / static_cast<unsigned>(std::max<std::size_t>(1, s.instruments.size())));
  ensure_out(s);

  auto results = run_all(s.instruments.size(), s.threads, [&](std::size_t i) {
    const auto& inst = s.instruments[i];
    const auto l = load(inst, s);
    auto r = compute_returns(l.prices.get(), s, inst.id);
    const mkt_frequency freq = mkt_prices_frequency(l.prices.get());

    if (!s.from.empty() || !s.to.empty()) {
      const mkt_time first = s.from.empty() ? mkt_returns_time(r.get(), 0) : parse_date(s.from, "--from");
      const mkt_time last = s.to.empty() ? mkt_returns_time(r.get(), mkt_returns_size(r.get()) - 1)
                                         : parse_date(s.to, "--to");
      mkt_window w{};
      check(mkt_returns_window_dates(r.get(), first, last, &w), inst.id + ": date range");
      mkt_returns* sub = nullptr;
      check(mkt_returns_subset(r.get(), w, &sub), inst.id + ": date range");
      r.reset(sub);
    }

    mkt_sequence_spec spec = mkt_sequence_defaults(freq, mkt_prices_bars_per_day(l.prices.get()));
    if (s.base_length) spec.base_length = *s.base_length;
    if (s.increment) spec.increment = *s.increment;
    if (s.steps) spec.steps = *s.steps;
    if (s.stride) spec.stride = *s.stride;
    if (s.sequence_count) spec.sequence_count = *s.sequence_count;
    spec.anchor_mode = mode;

    mkt_binning binning{};
    if (s.range == "series") {
      check(mkt_series_binning(r.get(), spec.base_length, s.bins, &binning), inst.id + ": binning");
    } else {
      binning = {s.bins ? s.bins : mkt_velleman_bins(spec.base_length), 0, 0.0, 0.0};
    }

    mkt_spectra* sp = nullptr;
    check(mkt_spectra_compute(r.get(), &spec, &binning, inner, &sp), inst.id + ": spectrum");
    const Spectra spectra(sp);
    mkt_events* ev = nullptr;
    check(mkt_detect_events(spectra.get(), &detector, &ev), inst.id + ": events");
    const Events events(ev);

    check(mkt_spectra_write_csv(spectra.get(), "spectrum", out_path(s, inst.id, "_spectrum.csv").c_str()),
          inst.id + ": write");
    check(mkt_spectra_write_csv(spectra.get(), "monthly", out_path(s, inst.id, "_monthly.csv").c_str()),
          inst.id + ": write");
    check(mkt_spectra_write_csv(spectra.get(), "daily_max", out_path(s, inst.id, "_daily_max.csv").c_str()),
          inst.id + ": write");
    check(mkt_events_write_csv(events.get(), out_path(s, inst.id, "_events.csv").c_str()),
          inst.id + ": write");

    Outcome o;
    const std::size_t n_events = mkt_events_count(events.get());
    o.out = inst.id + ": sequences=" + std::to_string(mkt_spectra_count(spectra.get())) +
            " events=" + std::to_string(n_events) + "\n";
    for (std::size_t e = 0; e < n_events; ++e) {
      mkt_event x{};
      check(mkt_events_get(events.get(), e, &x), inst.id + ": events");
      o.out += "  onset " + format_time(x.onset_time, freq) + " peak=" + fmt6(x.peak_value) +
               " ramp=" + fmt6(x.ramp_slope) + " persistence=" + std::to_string(x.persistence) + "\n";
    }
    return o;
  });
  return report(results);
}

int cmd_pmf(const Settings& s) {
  require_instruments(s);
  if (s.day.empty()) throw Failure("pmf needs --day", kExitInput);
  if (s.span_days == 0) throw Failure("--span-days must be positive", kExitInput);
  const Instrument* inst = nullptr;
  if (!s.pmf_instrument.empty()) {
    for (const auto& i : s.instruments) {
      if (i.id == s.pmf_instrument) inst = &i;
    }
    if (!inst) throw Failure("unknown instrument '" + s.pmf_instrument + "'", kExitInput);
  } else if (s.instruments.size() == 1) {
    inst = &s.instruments.front();
  } else {
    throw Failure("several instruments given; choose one with --instrument", kExitInput);
  }

  const mkt_time day = parse_date(s.day, "--day");
  const auto l = load(*inst, s);
  const auto r = compute_returns(l.prices.get(), s, inst->id);

  mkt_window day_w{};
  check(mkt_returns_window_dates(r.get(), day, day, &day_w), inst->id + ": day");
  mkt_window span_w = day_w;
  if (s.span_days > 1) {
    mkt_window before{};
    int truncated = 0;
    check(mkt_returns_window_before(r.get(), day, s.span_days - 1, &before, &truncated),
          inst->id + ": span");
    if (truncated) {
      throw Failure(inst->id + ": fewer than " + std::to_string(s.span_days - 1) +
                        " trading days before " + s.day, kExitInput);
    }
    span_w.start = before.start;
  }

  // One binning for both snapshots: the span's range, Velleman bins of the day.
  const double* v = mkt_returns_values(r.get());
  const auto [lo, hi] = std::minmax_element(v + span_w.start, v + span_w.end);
  const std::size_t n = s.bins ? s.bins : mkt_velleman_bins(day_w.end - day_w.start);
  const mkt_binning binning{n, *lo < *hi ? 1 : 0, *lo, *hi};

  ensure_out(s);
  double h_day = 0.0, h_span = 0.0;
  const auto day_path = out_path(s, inst->id, "_pmf_day.csv");
  const auto span_path = out_path(s, inst->id, "_pmf_span.csv");
  check(mkt_pmf_write_csv(r.get(), day_w, &binning, day_path.c_str(), &h_day), inst->id + ": pmf");
  check(mkt_pmf_write_csv(r.get(), span_w, &binning, span_path.c_str(), &h_span), inst->id + ": pmf");
  const mkt_frequency freq = mkt_prices_frequency(l.prices.get());
  std::cout << inst->id << ": day=" << s.day << " H_day=" << fmt6(h_day)
            << " span=" << format_time(mkt_returns_time(r.get(), span_w.start), freq) << ".."
            << format_time(mkt_returns_time(r.get(), span_w.end - 1), freq)
            << " H_span=" << fmt6(h_span) << " bins=" << n << "\n";
  return kExitOk;
}

int cmd_synth(const Settings& s) {
  if (s.count == 0) throw Failure("--instruments must be positive", kExitInput);
  const mkt_time start = parse_date(s.start_date, "--start");
  std::vector<mkt_shock> shocks;
  for (const auto& sh : s.shocks) shocks.push_back({sh.day, sh.magnitude, sh.shape});
  ensure_out(s);

  auto results = run_all(s.count, s.threads, [&](std::size_t i) {
    std::string id = s.synth_id;
    if (s.count > 1) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%02zu", i + 1);
      id += buf;
    }
    mkt_synth_spec spec{};
    spec.seed = s.seed + i;
    spec.n_days = s.days;
    spec.bars_per_day = s.bars_per_day;
    spec.drift = s.drift;
    spec.volatility = s.volatility;
    spec.shocks = shocks.data();
    spec.n_shocks = shocks.size();
    spec.instrument_id = id.c_str();
    spec.start_date = start;

    mkt_prices* p = nullptr;
    mkt_injections* inj = nullptr;
    check(mkt_synth_generate(&spec, &p, &inj), id + ": synth");
    const Prices prices(p);
    const Injections injections(inj);
    const auto path = out_path(s, id, ".csv");
    check(mkt_prices_write_csv(prices.get(), path.c_str()), id + ": write");
    check(mkt_injections_write_csv(injections.get(), out_path(s, id, "_injections.csv").c_str()),
          id + ": write");
    return Outcome{kExitOk,
                   id + ": bars=" + std::to_string(mkt_prices_size(prices.get())) +
                       " shocks=" + std::to_string(mkt_injections_count(injections.get())) +
                       " -> " + path + "\n",
                   {}};
  });
  return report(results);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-based market analysis: ingest, compare, spectrum, pmf, synth"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mkt_version()));

  Flags f;
  app.add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--dt-col", f.dt_col, "Timestamp column name");
  app.add_option("--close-col", f.close_col, "Close price column name");
  app.add_option("--frequency", f.frequency, "auto, daily or 5min");
  app.add_option("--returns", f.returns, "log or nominal");
  app.add_option("--bins", f.bins, "Bin count (default: Velleman rule)");
  app.add_option("--theta", f.theta, "Detector threshold in dispersion units");
  app.add_option("--persistence", f.persistence, "Minimum flagged sequences per event");
  app.add_option("--baseline", f.baseline, "Trailing sequences in the detector baseline");
  app.add_option("--seed", f.seed, "Synthetic seed");
  app.add_option("--threads", f.threads, "Worker threads (0: all cores)");

  auto* ingest = app.add_subcommand("ingest", "Normalize and deduplicate price CSVs");
  ingest->add_option("files", f.files, "Input CSV files");
  ingest->add_option("--dedup-run", f.dedup_run, "Closed-market run length threshold");

  auto* compare = app.add_subcommand("compare", "Entropy and std-dev before/after an anchor date");
  compare->add_option("files", f.files, "Price CSV files");
  compare->add_option("--anchor", f.anchor_date, "Anchor date YYYY-MM-DD");
  compare->add_option("--before-days", f.before_days, "Trading days before the anchor");
  compare->add_option("--after-days", f.after_days, "Trading days from the anchor on");

  auto* spectrum = app.add_subcommand("spectrum", "Cumulative entropy spectra and events");
  spectrum->add_option("files", f.files, "Price CSV files");
  spectrum->add_option("--w0", f.base_length, "Base window length");
  spectrum->add_option("--dt", f.increment, "Window increment");
  spectrum->add_option("--steps", f.steps, "Increments per sequence (m)");
  spectrum->add_option("--stride", f.stride, "Stride between sequences");
  spectrum->add_option("--sequences", f.sequence_count, "Number of sequences (default: fill)");
  spectrum->add_option("--anchor-mode", f.anchor_mode, "right or left");
  spectrum->add_option("--range", f.range, "series (shared range) or window");
  spectrum->add_option("--from", f.from, "First date to analyse");
  spectrum->add_option("--to", f.to, "Last date to analyse");

  auto* pmf = app.add_subcommand("pmf", "PMF snapshots for a day and the span ending on it");
  pmf->add_option("files", f.files, "Price CSV file");
  pmf->add_option("--instrument", f.pmf_instrument, "Instrument id from the config");
  pmf->add_option("--day", f.day, "Day YYYY-MM-DD");
  pmf->add_option("--span-days", f.span_days, "Trading days in the span, the day included");

  auto* synth = app.add_subcommand("synth", "Generate synthetic GBM price series");
  synth->add_option("--days", f.days, "Trading days");
  synth->add_option("--bars-per-day", f.bars_per_day, "Bars per day (1: daily)");
  synth->add_option("--drift", f.drift, "Per-bar log drift");
  synth->add_option("--vol", f.volatility, "Per-bar log volatility");
  synth->add_option("--instruments", f.count, "Number of series (seeds seed, seed+1, ...)");
  synth->add_option("--id", f.synth_id, "Instrument id (prefix when several)");
  synth->add_option("--start", f.start_date, "First calendar date");
  synth->add_option("--shock", f.shocks, "DAY[:MAGNITUDE[:single|dispersed]]");

  for (auto* sub : {ingest, compare, spectrum, pmf, synth}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    const Settings s = resolve_settings(f);
    if (*ingest) return cmd_ingest(s);
    if (*compare) return cmd_compare(s);
    if (*spectrum) return cmd_spectrum(s);
    if (*pmf) return cmd_pmf(s);
    return cmd_synth(s);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
