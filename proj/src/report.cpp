#include "mktent/report.hpp"

#include <algorithm>
#include <map>

#include "mktent/csv.hpp"
#include "mktent/timestamp.hpp"

namespace mktent::report {

using csv::format_real;

std::string pmf_csv(const BinnedDistribution& dist) {
  std::string out = "bin_lo,bin_hi,mass\n";
  const double width = dist.bin_width();
  for (std::size_t i = 0; i < dist.masses.size(); ++i) {
    const double lo = dist.lo + static_cast<double>(i) * width;
    const double hi = i + 1 == dist.masses.size() ? dist.hi : lo + width;
    out += format_real(lo) + ',' + format_real(hi) + ',' + format_real(dist.masses[i]) + '\n';
  }
  return out;
}

std::string spectrum_csv(std::span<const EntropySpectrum> spectra, Frequency frequency) {
  std::string out = "sequence_index,anchor_timestamp,k,window_len,H\n";
  for (const auto& s : spectra) {
    const std::string prefix =
        std::to_string(s.sequence_index) + ',' + format_timestamp(s.anchor_timestamp, frequency) + ',';
    for (std::size_t k = 0; k < s.values.size(); ++k) {
      out += prefix + std::to_string(k) + ',' + std::to_string(s.window_lengths[k]) + ',' +
             format_real(s.values[k]) + '\n';
    }
  }
  return out;
}

std::string events_csv(std::span<const EventSignature> events, Frequency frequency) {
  std::string out = "onset_timestamp,peak_value,ramp_slope,persistence\n";
  for (const auto& e : events) {
    out += format_timestamp(e.onset_timestamp, frequency) + ',' + format_real(e.peak_value) + ',' +
           format_real(e.ramp_slope) + ',' + std::to_string(e.persistence) + '\n';
  }
  return out;
}

std::string monthly_csv(std::span<const EntropySpectrum> spectra) {
  struct Acc {
    std::size_t sequences = 0;
    std::size_t values = 0;
    double sum = 0.0;
    double max = 0.0;
  };
  std::map<std::string, Acc> months;
  for (const auto& s : spectra) {
    auto& acc = months[format_month(date_of(s.anchor_timestamp))];
    ++acc.sequences;
    for (double h : s.values) {
      acc.sum += h;
      acc.max = acc.values == 0 ? h : std::max(acc.max, h);
      ++acc.values;
    }
  }
  std::string out = "month,sequences,mean_H,max_H\n";
  for (const auto& [month, acc] : months) {
    const double mean = acc.values ? acc.sum / static_cast<double>(acc.values) : 0.0;
    out += month + ',' + std::to_string(acc.sequences) + ',' + format_real(mean) + ',' +
           format_real(acc.max) + '\n';
  }
  return out;
}

std::string daily_max_csv(std::span<const EntropySpectrum> spectra) {
  std::map<Date, std::pair<std::size_t, double>> days;
  for (const auto& s : spectra) {
    if (s.values.empty()) continue;
    const double peak = *std::max_element(s.values.begin(), s.values.end());
    auto [it, inserted] = days.try_emplace(date_of(s.anchor_timestamp), 0, peak);
    ++it->second.first;
    it->second.second = std::max(it->second.second, peak);
  }
  std::string out = "date,sequences,max_H\n";
  for (const auto& [day, v] : days) {
    out += format_date(day) + ',' + std::to_string(v.first) + ',' + format_real(v.second) + '\n';
  }
  return out;
}

std::string injections_csv(std::span<const Injection> log, Frequency frequency) {
  std::string out = "timestamp,magnitude_sigma,shape\n";
  for (const auto& inj : log) {
    out += format_timestamp(inj.time, frequency) + ',' + format_real(inj.magnitude_sigma) + ',' +
           to_string(inj.shape) + '\n';
  }
  return out;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out =
      "instrument,window,count,mean,min,max,skewness,kurtosis,variance,std_dev,q1,median,q3\n";
  for (const auto& r : rows) {
    const auto& s = r.stats;
    out += r.instrument + ',' + r.window + ',' + std::to_string(s.count);
    for (double v : {s.mean, s.min, s.max, s.skewness, s.kurtosis, s.variance, s.std_dev, s.q1,
                     s.median, s.q3}) {
      out += ',' + format_real(v);
    }
    out += '\n';
  }
  return out;
}

std::string compare_csv(std::span<const CompareRow> rows) {
  std::string out =
      "instrument,entropy_before,entropy_after,entropy_pct_diff,std_before,std_after,std_pct_diff\n";
  for (const auto& r : rows) {
    out += r.instrument;
    for (double v : {r.entropy.before, r.entropy.after, r.entropy.pct_difference, r.std_dev.before,
                     r.std_dev.after, r.std_dev.pct_difference}) {
      out += ',' + format_real(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace mktent::report
