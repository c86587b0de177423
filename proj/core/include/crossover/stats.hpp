#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crossover/index.hpp"
#include "crossover/probe.hpp"

namespace crossover {

struct OrderParameter {
  double p = 0.0;
  double p_stderr = 0.0;
};

// Fraction of queries with E > 0 and its binomial standard error.
// Throws EmptySample on empty input.
OrderParameter order_parameter(std::span<const std::uint64_t> e);

// (<E^2> - <E>^2) / <E>^2, defined as 0 when <E> = 0.
// Throws EmptySample on empty input.
double susceptibility(std::span<const std::uint64_t> e);

struct HistogramBin {
  std::uint64_t lower = 0;  // inclusive
  std::uint64_t upper = 0;  // exclusive, always 2 * lower
  std::uint64_t count = 0;
  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

// Base-2 logarithmic bins [2^k, 2^(k+1)) from 1 up to the largest value seen;
// zeros are tallied separately.
struct LogHistogram {
  std::uint64_t zero_count = 0;
  std::vector<HistogramBin> bins;
  std::uint64_t total = 0;
};

LogHistogram log_histogram(std::span<const std::uint64_t> e);

// Per-unit-width density of the first bin over that of the second; close to 1
// when the head of the distribution is flat. NaN if either bin is missing.
double head_flatness_ratio(const LogHistogram& histogram);

struct TailFit {
  double alpha = 0.0;
  double stderr_alpha = 0.0;
  std::size_t n_tail = 0;
  double e_min = 0.0;
};

// kDiscrete: integer counts; the tail is treated as continuous from e_min - 0.5.
// kContinuous: real-valued samples; the tail starts at e_min itself.
enum class TailSampling { kDiscrete, kContinuous };

// Hill maximum-likelihood estimator over values >= e_min:
// alpha = 1 + n / sum ln(e_i / base), base = e_min - 0.5 (discrete) or e_min,
// stderr = (alpha - 1) / sqrt(n).
// Throws InsufficientTail (< 10 tail points) or DegenerateTail (all equal).
TailFit tail_exponent(std::span<const double> values, double e_min, TailSampling sampling = TailSampling::kDiscrete);
TailFit tail_exponent(std::span<const std::uint64_t> values, double e_min);
// 90th percentile (nearest rank) of the positive values; 0 when there are none.
double default_tail_cutoff(std::span<const std::uint64_t> values);

struct CurvePoint {
  double n = 0.0;
  double p = 0.0;
};

struct CrossoverFit {
  double n_c = 0.0;
  double threshold = 0.5;
  // Curve points bracketing the crossing: p(lower_n) >= threshold > p(upper_n).
  double lower_n = 0.0;
  double upper_n = 0.0;
  // More than one downward crossing, or the curve returns above threshold.
  bool ambiguous = false;
  std::string method = "linear-interpolation";
};

// Linear interpolation across the first downward threshold crossing of a curve
// sorted by n. Throws NoCrossing when the curve never drops below threshold
// after reaching it.
CrossoverFit estimate_nc(std::span<const CurvePoint> curve, double threshold = 0.5);

// Uniform random reservoir: A letters and T_N i.i.d. uniform tokens of each length N.
struct NullModel {
  std::size_t alphabet_size = 26;
  std::uint64_t default_tokens = 0;
  std::map<std::size_t, std::uint64_t> tokens_by_length;

  static NullModel uniform(std::size_t alphabet_size, std::uint64_t tokens_per_length);
  // T_N = number of length-N token occurrences in the index.
  static NullModel from_index(const Index& index, std::size_t max_length);

  std::uint64_t tokens_at(std::size_t n) const;
};

// 1 - (1 - A^-N)^T, evaluated in log space.
double analytic_null_p(std::size_t alphabet_size, std::uint64_t tokens, std::size_t n);
double analytic_null_p(const NullModel& model, std::size_t n);

// Real N where the analytic curve equals `threshold`:
// N = -log_A(1 - (1 - threshold)^(1/T)), approximately log_A(T / ln 2) at 0.5.
double analytic_null_nc(std::size_t alphabet_size, std::uint64_t tokens, double threshold = 0.5);

struct FssPoint {
  double tokens = 0.0;  // T_N
  double n_c = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least squares of n_c against log_A(T_N). Throws InsufficientData unless at
// least two distinct T_N are given.
LinearFit fss_fit(std::span<const FssPoint> points, std::size_t alphabet_size);

// Everything reported for one query length.
struct LengthSummary {
  std::size_t n = 0;
  std::uint64_t q = 0;
  double p = 0.0;
  double p_stderr = 0.0;
  double r = 0.0;
  double mean_e = 0.0;
  std::uint64_t zero_count = 0;
  LogHistogram histogram;
  bool complete = true;
};

// Throws EmptySample when the length has no records.
LengthSummary summarize(const LengthResult& result);
std::vector<LengthSummary> summarize(const CampaignResult& result);
std::vector<CurvePoint> p_curve(std::span<const LengthSummary> summaries);

// "n,q,p,p_se,r,mean_e,zero_count,nc_flag". nc_flag is 1 on the row at the
// lower side of the crossing, 2 on the upper side, 0 elsewhere.
void write_summary_csv(std::ostream& out, std::span<const LengthSummary> summaries,
                       const std::optional<CrossoverFit>& fit);
// "n,bin_lo,bin_hi,count"; zeros are reported as the bin [0, 1).
void write_histogram_csv(std::ostream& out, std::span<const LengthSummary> summaries);

}  // namespace crossover
