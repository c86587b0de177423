#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "crossover/errors.hpp"
#include "crossover/rng.hpp"
#include "crossover/stats.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crossover;
using E = std::vector<std::uint64_t>;

TEST_SUITE("stats") {
TEST_CASE("order parameter") {
  const auto half = order_parameter(E{0, 3, 1, 0});
  CHECK(half.p == 0.5);
  CHECK(half.p_stderr == doctest::Approx(std::sqrt(0.25 / 4)));
  const auto all = order_parameter(E{5, 1, 9});
  CHECK(all.p == 1.0);
  CHECK(all.p_stderr == 0.0);
  const auto none = order_parameter(E{0, 0, 0});
  CHECK(none.p == 0.0);
  CHECK(none.p_stderr == 0.0);
  CHECK_THROWS_AS(order_parameter(E{}), EmptySample);
}

TEST_CASE("susceptibility") {
  CHECK(susceptibility(E{7, 7, 7}) == 0.0);
  CHECK(susceptibility(E{0, 2}) == doctest::Approx(1.0));  // m1 = 1, m2 = 2
  CHECK(susceptibility(E{0, 0, 0}) == 0.0);
  CHECK_THROWS_AS(susceptibility(E{}), EmptySample);
}

TEST_CASE("estimators are bounded, permutation-invariant and match brute force") {
  for (std::uint64_t trial = 0; trial < 300; ++trial) {
    Stream rng(trial, StreamDomain::kReplication, {3});
    E e(1 + rng.below(60));
    const std::uint64_t scale = std::uint64_t{1} << rng.below(40);
    for (auto& x : e) x = rng.bernoulli(0.4) ? 0 : rng.below(scale) + 1;
    const auto op = order_parameter(e);
    const double r = susceptibility(e);
    REQUIRE(op.p >= 0.0);
    REQUIRE(op.p <= 1.0);
    REQUIRE(r >= 0.0);
    CHECK(r == doctest::Approx(oracle::relative_variance(e)).epsilon(1e-9));

    auto shuffled = e;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(rng.below(shuffled.size())), shuffled.end());
    CHECK(order_parameter(shuffled).p == op.p);
    CHECK(susceptibility(shuffled) == doctest::Approx(r).epsilon(1e-12));

    const auto h = log_histogram(e);
    std::uint64_t total = h.zero_count;
    for (const auto& b : h.bins) total += b.count;
    CHECK(total == e.size());
    CHECK(h.total == e.size());
  }
}

TEST_CASE("log histogram binning") {
  const auto h = log_histogram(E{1, 1, 2, 3, 8});
  REQUIRE(h.bins.size() == 4);
  CHECK(h.bins[0] == HistogramBin{1, 2, 2});
  CHECK(h.bins[1] == HistogramBin{2, 4, 2});
  CHECK(h.bins[2] == HistogramBin{4, 8, 0});
  CHECK(h.bins[3] == HistogramBin{8, 16, 1});
  CHECK(h.zero_count == 0);

  const auto empty = log_histogram(E{});
  CHECK(empty.total == 0);
  CHECK(empty.bins.empty());

  const auto z = log_histogram(E{0, 0, 1});
  CHECK(z.zero_count == 2);
  REQUIRE(z.bins.size() == 1);
  CHECK(z.bins[0] == HistogramBin{1, 2, 1});

  const auto big = log_histogram(E{std::uint64_t{1} << 63});
  CHECK(big.bins.size() == 64);
  CHECK(big.bins.back().count == 1);
}

TEST_CASE("head flatness ratio") {
  // 4 values in [1,2), 8 in [2,4): equal density per unit width.
  E e(4, 1);
  e.insert(e.end(), 4, 2);
  e.insert(e.end(), 4, 3);
  CHECK(head_flatness_ratio(log_histogram(e)) == doctest::Approx(1.0));
  CHECK(std::isnan(head_flatness_ratio(log_histogram(E{1}))));
}

TEST_CASE("Hill estimator recovers a continuous Pareto exponent") {
  // Inverse CDF for Pareto(alpha = 2, x_min = 1): x = (1 - u)^(-1 / (alpha - 1)).
  std::vector<double> x;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    Stream rng(4242, StreamDomain::kReplication, {i});
    x.push_back(1.0 / (1.0 - rng.uniform()));
  }
  const auto fit = tail_exponent(x, 1.0, TailSampling::kContinuous);
  CHECK(fit.n_tail == 10000);
  CHECK(std::abs(fit.alpha - 2.0) <= 2 * fit.stderr_alpha);
}

TEST_CASE("Hill estimator with continuity correction on discretized Pareto") {
  // Round a continuous Pareto(alpha = 2.5, x_min = 9.5) to integers; the
  // corrected estimator with e_min = 10 treats [9.5, 10.5) as the value 10.
  E e;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    Stream rng(99, StreamDomain::kReplication, {i});
    const double x = 9.5 * std::pow(1.0 - rng.uniform(), -1.0 / 1.5);
    e.push_back(static_cast<std::uint64_t>(std::floor(x + 0.5)));
  }
  const auto fit = tail_exponent(e, 10.0);
  CHECK(std::abs(fit.alpha - 2.5) <= 3 * fit.stderr_alpha);
}

TEST_CASE("Hill estimator errors") {
  CHECK_THROWS_AS(tail_exponent(E(50, 5), 5.0), DegenerateTail);
  CHECK_THROWS_AS(tail_exponent(E{10, 20, 30}, 5.0), InsufficientTail);
  CHECK_THROWS_AS(tail_exponent(E{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}, 5.0), InsufficientTail);
  CHECK(default_tail_cutoff(E{0, 0}) == 0.0);
  E ten{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 0};
  CHECK(default_tail_cutoff(ten) == 9.0);
}

TEST_CASE("crossover interpolation") {
  const std::vector<CurvePoint> curve{{1, 1}, {2, 1}, {3, 1}, {4, 0.9}, {5, 0.4}, {6, 0.05}, {7, 0}};
  const auto fit = estimate_nc(curve);
  // 4 + (0.9 - 0.5) / (0.9 - 0.4)
  CHECK(fit.n_c == doctest::Approx(4.8));
  CHECK(fit.lower_n == 4);
  CHECK(fit.upper_n == 5);
  CHECK_FALSE(fit.ambiguous);

  const std::vector<CurvePoint> flat{{1, 1}, {2, 1}, {3, 1}};
  CHECK_THROWS_AS(estimate_nc(flat), NoCrossing);
  CHECK_THROWS_AS(estimate_nc(std::vector<CurvePoint>{}), NoCrossing);

  const std::vector<CurvePoint> bumpy{{1, 1}, {2, 0.3}, {3, 0.7}, {4, 0.1}};
  const auto first = estimate_nc(bumpy);
  CHECK(first.n_c == doctest::Approx(1 + 0.5 / 0.7));
  CHECK(first.ambiguous);

  // P close to 1 below 6 and close to 0 above.
  const std::vector<CurvePoint> sharp{{3, 1}, {4, 1}, {5, 0.97}, {6, 0.45}, {7, 0.01}, {8, 0}};
  const auto nc = estimate_nc(sharp);
  CHECK(nc.n_c > 5.0);
  CHECK(nc.n_c < 7.0);
}

TEST_CASE("crossover brackets the threshold on random monotone curves") {
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    Stream rng(trial, StreamDomain::kReplication, {9});
    std::vector<CurvePoint> curve;
    double p = 1.0;
    for (int n = 1; n <= 10; ++n) {
      curve.push_back({static_cast<double>(n), p});
      p *= rng.uniform();
    }
    if (curve.back().p >= 0.5) continue;
    const auto fit = estimate_nc(curve);
    const auto at = [&](double n) { return curve[static_cast<std::size_t>(n) - 1].p; };
    CHECK(at(std::floor(fit.n_c)) >= 0.5);
    CHECK(at(std::ceil(fit.n_c)) <= 0.5);
  }
}

TEST_CASE("analytic null model") {
  CHECK(analytic_null_p(26, 0, 3) == 0.0);
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto t = static_cast<std::uint64_t>(std::pow(26.0, static_cast<double>(n)));
    CHECK(std::abs(analytic_null_p(26, t, n) - (1 - std::exp(-1.0))) <= 1e-3);
  }
  CHECK(std::abs(analytic_null_p(26, 1000000, 3) - 1.0) <= 1e-12);
  CHECK(analytic_null_p(1, 5, 3) == 1.0);
  // Far past underflow of (1 - A^-N)^T the log-space form stays finite and positive.
  CHECK(analytic_null_p(26, 1, 100) > 0.0);

  for (std::uint64_t t : {1ull, 10ull, 676ull, 100000ull}) {
    // Strict until both values round to 1.0 in double precision.
    for (std::size_t n = 1; n < 12; ++n) {
      const double longer = analytic_null_p(26, t, n + 1), shorter = analytic_null_p(26, t, n);
      CHECK((longer < shorter || longer == 1.0));
    }
  }
  for (std::size_t n = 2; n < 8; ++n) {
    for (std::uint64_t t = 1; t < 1000000; t *= 7) {
      const double smaller = analytic_null_p(26, t, n), larger = analytic_null_p(26, t * 7, n);
      CHECK((larger > smaller || smaller == 1.0));
    }
  }

  const auto model = NullModel::uniform(26, 17576);
  CHECK(analytic_null_p(model, 3) == analytic_null_p(26, 17576, 3));
}

TEST_CASE("analytic crossover and finite-size fit") {
  CHECK(analytic_null_nc(26, 17576) == doctest::Approx(3.1124990112508044).epsilon(1e-10));
  for (std::uint64_t t : {676ull, 17576ull, 456976ull}) {
    const double nc = analytic_null_nc(26, t);
    // The analytic curve passes through 0.5 at its own crossing.
    const double miss = std::pow(1 - std::pow(26.0, -nc), static_cast<double>(t));
    CHECK(miss == doctest::Approx(0.5).epsilon(1e-9));
  }
  std::vector<FssPoint> points;
  for (std::uint64_t t : {676ull, 17576ull, 456976ull}) points.push_back({static_cast<double>(t), analytic_null_nc(26, t)});
  const auto fit = fss_fit(points, 26);
  CHECK(std::abs(fit.slope - 1.0) <= 0.05);
  // -log_26(ln 2)
  CHECK(fit.intercept == doctest::Approx(0.11249295909575278).epsilon(5e-3));

  const std::vector<FssPoint> same{{676, 2.1}, {676, 2.2}};
  CHECK_THROWS_AS(fss_fit(same, 26), InsufficientData);
  const std::vector<FssPoint> single{{676, 2.1}};
  CHECK_THROWS_AS(fss_fit(single, 26), InsufficientData);
  const std::vector<FssPoint> line{{26, 1.0}, {676, 2.0}};
  CHECK(fss_fit(line, 26).slope == doctest::Approx(1.0));
  CHECK(fss_fit(line, 26).intercept == doctest::Approx(0.0));
}

TEST_CASE("summary and histogram CSV") {
  LengthResult one{2, {{2, 0, "aa", 3}, {2, 1, "ab", 0}}, false, std::nullopt};
  LengthResult two{3, {{3, 0, "aaa", 0}, {3, 1, "abb", 0}}, false, std::nullopt};
  CampaignResult campaign{"local", {one, two}};
  const auto summaries = summarize(campaign);
  const auto fit = estimate_nc(p_curve(summaries));
  std::ostringstream csv;
  write_summary_csv(csv, summaries, fit);
  CHECK(csv.str() ==
        "n,q,p,p_se,r,mean_e,zero_count,nc_flag\n"
        "2,2,0.5,0.353553,1,1.5,1,1\n"
        "3,2,0,0,0,0,2,2\n");
  std::ostringstream hist;
  write_histogram_csv(hist, summaries);
  CHECK(hist.str() == "n,bin_lo,bin_hi,count\n2,0,1,1\n2,1,2,0\n2,2,4,1\n3,0,1,2\n");

  LengthResult empty{4, {}, false, std::string("BackendUnavailable: down")};
  CHECK_THROWS_AS(summarize(empty), EmptySample);
}
}
