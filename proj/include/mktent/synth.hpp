#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mktent/types.hpp"

namespace mktent {

/// Standard normal draws from std::mt19937_64 via the Marsaglia polar
/// method. Uniforms take the top 53 bits of each engine output. Both
/// algorithms are fixed so a seed reproduces the same stream everywhere.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double operator()();

 private:
  double uniform();

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class ShockShape { SingleBar, DispersedDay };

const char* to_string(ShockShape s) noexcept;

struct Shock {
  std::size_t day_index = 0;
  double magnitude_sigma = 10.0;
  ShockShape shape = ShockShape::SingleBar;
};

struct SynthSpec {
  std::uint64_t seed = 1;
  std::size_t n_days = 20;
  std::size_t bars_per_day = 78;
  double drift = 0.0;         // per bar, log scale
  double volatility = 0.001;  // per bar, log scale
  std::vector<Shock> shocks;
  std::string instrument_id = "SYNTH";
  double initial_price = 100.0;
  Date start_date = Date{std::chrono::year{2025} / 1 / 2};
};

struct Injection {
  Timestamp time;
  std::size_t bar_index = 0;  // index into the price series
  std::size_t day_index = 0;
  double magnitude_sigma = 0.0;
  ShockShape shape = ShockShape::SingleBar;
};

struct SynthResult {
  PriceSeries series;
  std::vector<Injection> injections;
  std::vector<double> increments;  // log increments; increments[t] moves close[t-1] -> close[t]
};

/// Geometric Brownian motion on weekday sessions. Intraday bars start at
/// 09:30 in five-minute steps; bars_per_day == 1 yields a Daily series.
/// SingleBar adds magnitude*sigma to bar bars_per_day/2 of the day;
/// DispersedDay multiplies every increment of the day by magnitude.
/// Throws InvalidArgument for shocks past n_days or negative volatility.
SynthResult generate(const SynthSpec& spec);

}  // namespace mktent
