#pragma once

#include <span>
#include <string>
#include <vector>

#include "mktent/cumentropy.hpp"
#include "mktent/entropy.hpp"
#include "mktent/stats.hpp"
#include "mktent/synth.hpp"
#include "mktent/types.hpp"

// CSV emitters for every report the pipeline writes. All share six-decimal
// reals and the normalized timestamp formats.
namespace mktent::report {

/// bin_lo,bin_hi,mass
std::string pmf_csv(const BinnedDistribution& dist);

/// sequence_index,anchor_timestamp,k,window_len,H
std::string spectrum_csv(std::span<const EntropySpectrum> spectra, Frequency frequency);

/// onset_timestamp,peak_value,ramp_slope,persistence
std::string events_csv(std::span<const EventSignature> events, Frequency frequency);

/// month,sequences,mean_H,max_H grouped by the calendar month of each anchor.
std::string monthly_csv(std::span<const EntropySpectrum> spectra);

/// date,sequences,max_H: peak entropy over all sequences anchored that day.
std::string daily_max_csv(std::span<const EntropySpectrum> spectra);

/// timestamp,magnitude_sigma,shape
std::string injections_csv(std::span<const Injection> log, Frequency frequency);

struct SummaryRow {
  std::string instrument;
  std::string window;
  SummaryStats stats;
};

/// instrument,window,count,mean,min,max,skewness,kurtosis,variance,std_dev,q1,median,q3
std::string summary_csv(std::span<const SummaryRow> rows);

struct CompareRow {
  std::string instrument;
  BeforeAfterComparison entropy;
  BeforeAfterComparison std_dev;
};

/// instrument,entropy_before,entropy_after,entropy_pct_diff,std_before,std_after,std_pct_diff
std::string compare_csv(std::span<const CompareRow> rows);

}  // namespace mktent::report
