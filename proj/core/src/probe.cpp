#include "crossover/probe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <thread>
#include <unordered_set>

#include "crossover/errors.hpp"

namespace crossover {

void Campaign::validate() const {
  if (n_lo < 1 || n_lo > n_hi) throw InvalidSpec("campaign length range must satisfy 1 <= lo <= hi");
  if (queries_per_n < 1) throw InvalidSpec("queries per length must be >= 1");
  if (workers < 1) throw InvalidSpec("workers must be >= 1");
}

bool CampaignResult::complete() const noexcept {
  return std::all_of(lengths.begin(), lengths.end(), [](const LengthResult& r) { return r.complete(); });
}

std::string random_string(std::size_t n, const Alphabet& alphabet, Stream& stream) {
  if (n == 0) throw InvalidQueryLength("query length must be >= 1");
  std::string s(n, '\0');
  for (auto& c : s) c = alphabet.at(stream.below(alphabet.size()));
  return s;
}

std::string campaign_query(const Campaign& campaign, std::size_t n, std::uint64_t i, std::uint64_t attempt) {
  Stream stream(campaign.seed, StreamDomain::kQuery, {n, i, attempt});
  return random_string(n, campaign.alphabet, stream);
}

namespace {

// A^n, saturating at 2^63.
std::uint64_t space_size(std::size_t alphabet_size, std::size_t n) {
  constexpr std::uint64_t cap = std::uint64_t{1} << 63;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > cap / alphabet_size) return cap;
    total *= alphabet_size;
  }
  return total;
}

// Query strings for one length, drawn before any backend call so that dedup
// redraws stay sequential while lookups fan out.
std::vector<std::string> draw_queries(const Campaign& c, std::size_t n, bool& exhausted) {
  std::vector<std::string> queries;
  exhausted = false;
  if (!c.dedup) {
    queries.reserve(c.queries_per_n);
    for (std::uint64_t i = 0; i < c.queries_per_n; ++i) queries.push_back(campaign_query(c, n, i));
    return queries;
  }
  const std::uint64_t space = space_size(c.alphabet.size(), n);
  std::unordered_set<std::string> seen;
  for (std::uint64_t i = 0; i < c.queries_per_n; ++i) {
    if (seen.size() >= space) {
      exhausted = true;
      break;
    }
    bool placed = false;
    for (std::uint64_t attempt = 0; attempt < c.dedup_retry_budget && !placed; ++attempt) {
      auto q = campaign_query(c, n, i, attempt);
      if (seen.insert(q).second) {
        queries.push_back(std::move(q));
        placed = true;
      }
    }
    if (!placed) {
      exhausted = true;
      break;
    }
  }
  return queries;
}

LengthResult probe_length(const Campaign& c, std::size_t n, QueryBackend& backend) {
  LengthResult result;
  result.n = n;
  const auto queries = draw_queries(c, n, result.space_exhausted);
  const std::uint64_t count = queries.size();
  std::vector<std::uint64_t> counts(count, 0);

  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> first_failure{count};
  std::mutex failure_mutex;
  std::string failure;

  auto work = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count || i > first_failure.load()) return;
      try {
        counts[i] = backend.count(queries[i]);
      } catch (const Error& e) {
        std::lock_guard lock(failure_mutex);
        if (i < first_failure.load()) {
          first_failure.store(i);
          failure = std::string(e.kind()) + ": " + e.what();
        }
        return;
      }
    }
  };

  const std::size_t workers = std::min<std::uint64_t>(c.workers, std::max<std::uint64_t>(count, 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }

  const std::uint64_t kept = first_failure.load();
  if (kept < count) result.failure = failure;
  result.records.reserve(kept);
  for (std::uint64_t i = 0; i < kept; ++i) result.records.push_back({n, i, queries[i], counts[i]});
  return result;
}

}  // namespace

CampaignResult run_campaign(const Campaign& campaign, QueryBackend& backend) {
  campaign.validate();
  CampaignResult out;
  out.backend_id = backend.id();
  for (std::size_t n = campaign.n_lo; n <= campaign.n_hi; ++n) out.lengths.push_back(probe_length(campaign, n, backend));
  return out;
}

void write_records_csv(std::ostream& out, const CampaignResult& result) {
  out << "n,seq,query,e\n";
  for (const auto& length : result.lengths)
    for (const auto& r : length.records) out << r.n << ',' << r.sequence_no << ',' << r.query << ',' << r.e << '\n';
}

}  // namespace crossover
