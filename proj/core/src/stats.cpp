#include "crossover/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <set>

#include "crossover/errors.hpp"
#include "crossover/util.hpp"

namespace crossover {

OrderParameter order_parameter(std::span<const std::uint64_t> e) {
  if (e.empty()) throw EmptySample("order parameter of an empty sample");
  const auto hits = std::count_if(e.begin(), e.end(), [](std::uint64_t x) { return x > 0; });
  const double q = static_cast<double>(e.size());
  const double p = static_cast<double>(hits) / q;
  return {p, std::sqrt(p * (1.0 - p) / q)};
}

double susceptibility(std::span<const std::uint64_t> e) {
  if (e.empty()) throw EmptySample("susceptibility of an empty sample");
  const double q = static_cast<double>(e.size());
  double mean = 0.0;
  for (auto x : e) mean += static_cast<double>(x);
  mean /= q;
  if (mean == 0.0) return 0.0;
  double var = 0.0;
  for (auto x : e) {
    const double d = static_cast<double>(x) - mean;
    var += d * d;
  }
  var /= q;
  return var / (mean * mean);
}

LogHistogram log_histogram(std::span<const std::uint64_t> e) {
  LogHistogram h;
  h.total = e.size();
  for (auto x : e) {
    if (x == 0) {
      ++h.zero_count;
      continue;
    }
    const auto k = static_cast<std::size_t>(std::bit_width(x) - 1);
    while (h.bins.size() <= k) {
      const std::uint64_t lower = std::uint64_t{1} << h.bins.size();
      h.bins.push_back({lower, lower * 2, 0});
    }
    ++h.bins[k].count;
  }
  return h;
}

double head_flatness_ratio(const LogHistogram& histogram) {
  if (histogram.bins.size() < 2 || histogram.bins[1].count == 0) return std::nan("");
  const double first = static_cast<double>(histogram.bins[0].count) / 1.0;
  const double second = static_cast<double>(histogram.bins[1].count) / 2.0;
  return first / second;
}

TailFit tail_exponent(std::span<const double> values, double e_min, TailSampling sampling) {
  const double base = sampling == TailSampling::kDiscrete ? e_min - 0.5 : e_min;
  if (!(base > 0.0)) throw InsufficientTail("tail cutoff must leave a positive base");
  std::size_t n = 0;
  double log_sum = 0.0;
  double first = 0.0;
  bool all_equal = true;
  for (double v : values) {
    if (!(v >= e_min)) continue;
    if (n == 0) first = v;
    else if (v != first) all_equal = false;
    log_sum += std::log(v / base);
    ++n;
  }
  if (n < 10) throw InsufficientTail("need at least 10 values at or above the cutoff, got " + std::to_string(n));
  if (all_equal) throw DegenerateTail("all tail values are equal");
  const double alpha = 1.0 + static_cast<double>(n) / log_sum;
  return {alpha, (alpha - 1.0) / std::sqrt(static_cast<double>(n)), n, e_min};
}

TailFit tail_exponent(std::span<const std::uint64_t> values, double e_min) {
  std::vector<double> v(values.begin(), values.end());
  return tail_exponent(std::span<const double>(v), e_min);
}

double default_tail_cutoff(std::span<const std::uint64_t> values) {
  std::vector<std::uint64_t> positive;
  for (auto v : values)
    if (v > 0) positive.push_back(v);
  if (positive.empty()) return 0.0;
  std::sort(positive.begin(), positive.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(positive.size())));
  return static_cast<double>(positive[std::max<std::size_t>(rank, 1) - 1]);
}

CrossoverFit estimate_nc(std::span<const CurvePoint> curve, double threshold) {
  std::size_t crossing = curve.size();
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    if (curve[i].p >= threshold && curve[i + 1].p < threshold) {
      crossing = i;
      break;
    }
  }
  if (crossing == curve.size()) throw NoCrossing("P never drops below " + format_real(threshold) + " after reaching it");

  const auto& hi = curve[crossing];
  const auto& lo = curve[crossing + 1];
  CrossoverFit fit;
  fit.threshold = threshold;
  fit.lower_n = hi.n;
  fit.upper_n = lo.n;
  fit.n_c = hi.n + (hi.p - threshold) / (hi.p - lo.p) * (lo.n - hi.n);
  for (std::size_t j = 0; j < curve.size(); ++j) {
    if ((j < crossing && curve[j].p < threshold) || (j > crossing + 1 && curve[j].p >= threshold)) fit.ambiguous = true;
  }
  return fit;
}

NullModel NullModel::uniform(std::size_t alphabet_size, std::uint64_t tokens_per_length) {
  return NullModel{alphabet_size, tokens_per_length, {}};
}

NullModel NullModel::from_index(const Index& index, std::size_t max_length) {
  NullModel model{index.alphabet().size(), 0, {}};
  for (std::size_t n = 1; n <= max_length; ++n) model.tokens_by_length[n] = index.tokens_by_length(n);
  return model;
}

std::uint64_t NullModel::tokens_at(std::size_t n) const {
  const auto it = tokens_by_length.find(n);
  return it == tokens_by_length.end() ? default_tokens : it->second;
}

double analytic_null_p(std::size_t alphabet_size, std::uint64_t tokens, std::size_t n) {
  if (alphabet_size < 1) throw InvalidSpec("alphabet size must be >= 1");
  if (n < 1) throw InvalidQueryLength("query length must be >= 1");
  if (tokens == 0) return 0.0;
  if (alphabet_size == 1) return 1.0;
  // miss = (1 - A^-N)^T = exp(T * log1p(-A^-N))
  const double single = std::exp(-static_cast<double>(n) * std::log(static_cast<double>(alphabet_size)));
  return -std::expm1(static_cast<double>(tokens) * std::log1p(-single));
}

double analytic_null_p(const NullModel& model, std::size_t n) {
  return analytic_null_p(model.alphabet_size, model.tokens_at(n), n);
}

double analytic_null_nc(std::size_t alphabet_size, std::uint64_t tokens, double threshold) {
  if (alphabet_size < 2) throw InvalidSpec("analytic crossover needs an alphabet of at least 2 letters");
  if (tokens == 0) throw NoCrossing("empty reservoir never reaches the threshold");
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidSpec("threshold must be in (0, 1)");
  // A^-N = 1 - (1 - threshold)^(1/T)
  const double single = -std::expm1(std::log1p(-threshold) / static_cast<double>(tokens));
  return -std::log(single) / std::log(static_cast<double>(alphabet_size));
}

LinearFit fss_fit(std::span<const FssPoint> points, std::size_t alphabet_size) {
  if (alphabet_size < 2) throw InvalidSpec("finite-size fit needs an alphabet of at least 2 letters");
  std::set<double> sizes;
  for (const auto& p : points) sizes.insert(p.tokens);
  if (points.size() < 2 || sizes.size() < 2) throw InsufficientData("need at least two distinct reservoir sizes");
  const double log_a = std::log(static_cast<double>(alphabet_size));
  double sx = 0, sy = 0;
  for (const auto& p : points) {
    if (!(p.tokens > 0)) throw InvalidSpec("reservoir sizes must be positive");
    sx += std::log(p.tokens) / log_a;
    sy += p.n_c;
  }
  const double k = static_cast<double>(points.size());
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (const auto& p : points) {
    const double dx = std::log(p.tokens) / log_a - mx;
    sxx += dx * dx;
    sxy += dx * (p.n_c - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

LengthSummary summarize(const LengthResult& result) {
  std::vector<std::uint64_t> e;
  e.reserve(result.records.size());
  for (const auto& r : result.records) e.push_back(r.e);
  if (e.empty()) throw EmptySample("no records for N=" + std::to_string(result.n));
  LengthSummary s;
  s.n = result.n;
  s.q = e.size();
  const auto op = order_parameter(e);
  s.p = op.p;
  s.p_stderr = op.p_stderr;
  s.r = susceptibility(e);
  double total = 0.0;
  for (auto x : e) total += static_cast<double>(x);
  s.mean_e = total / static_cast<double>(e.size());
  s.histogram = log_histogram(e);
  s.zero_count = s.histogram.zero_count;
  s.complete = result.complete();
  return s;
}

std::vector<LengthSummary> summarize(const CampaignResult& result) {
  std::vector<LengthSummary> out;
  for (const auto& length : result.lengths) {
    if (length.records.empty()) continue;
    out.push_back(summarize(length));
  }
  return out;
}

std::vector<CurvePoint> p_curve(std::span<const LengthSummary> summaries) {
  std::vector<CurvePoint> curve;
  curve.reserve(summaries.size());
  for (const auto& s : summaries) curve.push_back({static_cast<double>(s.n), s.p});
  return curve;
}

void write_summary_csv(std::ostream& out, std::span<const LengthSummary> summaries,
                       const std::optional<CrossoverFit>& fit) {
  out << "n,q,p,p_se,r,mean_e,zero_count,nc_flag\n";
  for (const auto& s : summaries) {
    int flag = 0;
    if (fit && static_cast<double>(s.n) == fit->lower_n) flag = 1;
    if (fit && static_cast<double>(s.n) == fit->upper_n) flag = 2;
    out << s.n << ',' << s.q << ',' << format_real(s.p) << ',' << format_real(s.p_stderr) << ',' << format_real(s.r)
        << ',' << format_real(s.mean_e) << ',' << s.zero_count << ',' << flag << '\n';
  }
}

void write_histogram_csv(std::ostream& out, std::span<const LengthSummary> summaries) {
  out << "n,bin_lo,bin_hi,count\n";
  for (const auto& s : summaries) {
    out << s.n << ",0,1," << s.histogram.zero_count << '\n';
    for (const auto& b : s.histogram.bins) out << s.n << ',' << b.lower << ',' << b.upper << ',' << b.count << '\n';
  }
}

}  // namespace crossover
