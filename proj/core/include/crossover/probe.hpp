#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossover/corpus.hpp"
#include "crossover/index.hpp"
#include "crossover/rng.hpp"

namespace crossover {

// Anything that answers "how many results for this query". Implementations
// must be callable from several threads at once, and must throw rather than
// return 0 when they cannot answer.
class QueryBackend {
 public:
  virtual ~QueryBackend() = default;
  virtual std::uint64_t count(std::string_view query) = 0;
  virtual std::string id() const = 0;
};

class LocalBackend final : public QueryBackend {
 public:
  explicit LocalBackend(const Index& index) : index_(index) {}
  std::uint64_t count(std::string_view query) override { return index_.lookup(query); }
  std::string id() const override { return "local"; }

 private:
  const Index& index_;
};

struct Campaign {
  std::size_t n_lo = 1;
  std::size_t n_hi = 10;
  std::uint64_t queries_per_n = 20000;
  std::uint64_t seed = 0;
  bool dedup = false;
  Alphabet alphabet;
  // Number of threads issuing backend calls; never affects the output.
  std::size_t workers = 1;
  // Redraws allowed per record before a dedup campaign gives up on a length.
  std::size_t dedup_retry_budget = 256;

  void validate() const;  // Throws InvalidSpec.
};

struct QueryRecord {
  std::size_t n = 0;
  std::uint64_t sequence_no = 0;
  std::string query;
  std::uint64_t e = 0;
  friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

// Records for one query length. When the backend fails, `records` holds the
// successful prefix (sequence numbers below the first failure) and `failure`
// names the error.
struct LengthResult {
  std::size_t n = 0;
  std::vector<QueryRecord> records;
  bool space_exhausted = false;
  std::optional<std::string> failure;

  bool complete() const noexcept { return !failure.has_value(); }
};

struct CampaignResult {
  std::string backend_id;
  std::vector<LengthResult> lengths;

  bool complete() const noexcept;
};

// N characters i.i.d. uniform over the alphabet. Throws InvalidQueryLength for N = 0.
std::string random_string(std::size_t n, const Alphabet& alphabet, Stream& stream);

// Query i of length N is drawn from the stream keyed (seed, N, i).
std::string campaign_query(const Campaign& campaign, std::size_t n, std::uint64_t i, std::uint64_t attempt = 0);

CampaignResult run_campaign(const Campaign& campaign, QueryBackend& backend);

// CSV "n,seq,query,e", rows ordered by (n, seq).
void write_records_csv(std::ostream& out, const CampaignResult& result);

}  // namespace crossover
