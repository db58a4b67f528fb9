#include "mktent/synth.hpp"

#include <cmath>

#include "mktent/error.hpp"

namespace mktent {

double NormalSampler::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalSampler::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0, v = 0.0, s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

const char* to_string(ShockShape s) noexcept {
  return s == ShockShape::SingleBar ? "single_bar" : "dispersed_day";
}

namespace {

using namespace std::chrono;

std::vector<Date> weekday_sessions(Date start, std::size_t n) {
  std::vector<Date> out;
  out.reserve(n);
  for (Date d = start; out.size() < n; d += days{1}) {
    const weekday wd{d};
    if (wd != Saturday && wd != Sunday) out.push_back(d);
  }
  return out;
}

}  // namespace

SynthResult generate(const SynthSpec& spec) {
  if (spec.n_days == 0 || spec.bars_per_day == 0) {
    throw Error(ErrorCode::InvalidArgument, "n_days and bars_per_day must be positive");
  }
  if (!(spec.volatility >= 0.0)) throw Error(ErrorCode::InvalidArgument, "volatility must be non-negative");
  if (!(spec.initial_price > 0.0)) throw Error(ErrorCode::InvalidArgument, "initial price must be positive");
  constexpr std::size_t kMaxBars = (24 * 60 - (9 * 60 + 30)) / 5;
  if (spec.bars_per_day > kMaxBars) {
    throw Error(ErrorCode::InvalidArgument, "bars_per_day does not fit into one session");
  }
  for (const auto& s : spec.shocks) {
    if (s.day_index >= spec.n_days) {
      throw Error(ErrorCode::InvalidArgument,
                  "shock day " + std::to_string(s.day_index) + " is past the last day");
    }
  }

  const std::size_t bpd = spec.bars_per_day;
  const std::size_t n = spec.n_days * bpd;
  const bool daily = bpd == 1;
  const auto sessions = weekday_sessions(spec.start_date, spec.n_days);

  std::vector<Timestamp> times(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Timestamp day{sessions[t / bpd]};
    times[t] = daily ? day : day + hours{9} + minutes{30} + minutes{5 * static_cast<int>(t % bpd)};
  }

  // Draw the whole stream before shocks so a shocked path shares every draw
  // with its unshocked twin.
  NormalSampler normal(spec.seed);
  std::vector<double> inc(n, 0.0);
  for (std::size_t t = 1; t < n; ++t) inc[t] = spec.drift + spec.volatility * normal();

  std::vector<Injection> log;
  for (const auto& s : spec.shocks) {
    const std::size_t day_first = s.day_index * bpd;
    if (s.shape == ShockShape::SingleBar) {
      const std::size_t t = std::max<std::size_t>(day_first + bpd / 2, 1);
      inc[t] += s.magnitude_sigma * spec.volatility;
      log.push_back({times[t], t, s.day_index, s.magnitude_sigma, s.shape});
    } else {
      for (std::size_t t = std::max<std::size_t>(day_first, 1); t < day_first + bpd; ++t) {
        inc[t] *= s.magnitude_sigma;
      }
      log.push_back({times[day_first], day_first, s.day_index, s.magnitude_sigma, s.shape});
    }
  }

  std::vector<PricePoint> points(n);
  double cumulative = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    cumulative += inc[t];
    points[t] = {times[t], spec.initial_price * std::exp(cumulative)};
  }

  return {PriceSeries(spec.instrument_id, daily ? Frequency::Daily : Frequency::FiveMinute,
                      std::move(points)),
          std::move(log), std::move(inc)};
}

}  // namespace mktent
