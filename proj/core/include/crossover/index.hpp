#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crossover/corpus.hpp"

namespace crossover {

struct TokenStats {
  std::uint64_t doc_freq = 0;
  std::uint64_t occ_count = 0;
  friend bool operator==(const TokenStats&, const TokenStats&) = default;
};

// Exact whole-token index. The result count E of a query is its document
// frequency; occurrence counts are kept for diagnostics. Immutable once built.
class Index {
 public:
  using Table = std::unordered_map<std::string, TokenStats>;

  Index() = default;
  explicit Index(const Corpus& corpus);
  // Rebuilds from a token table, e.g. a loaded snapshot.
  Index(Table table, std::uint64_t doc_count, Alphabet alphabet);

  // Document frequency of `query`, 0 when absent. Throws InvalidQuery for an
  // empty query or one with characters outside the alphabet.
  std::uint64_t lookup(std::string_view query) const;
  const TokenStats* find(std::string_view token) const;

  // Number of distinct token types of length n.
  std::uint64_t distinct_by_length(std::size_t n) const;
  // Number of token occurrences of length n.
  std::uint64_t tokens_by_length(std::size_t n) const;
  // Exact fraction of the A^n length-n strings present in the index.
  double occupied_fraction(std::size_t n) const;

  const Table& table() const noexcept { return table_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::uint64_t doc_count() const noexcept { return doc_count_; }
  std::size_t distinct_count() const noexcept { return table_.size(); }
  // Per-length distinct-type census (lengths with zero types are omitted).
  const std::map<std::size_t, std::uint64_t>& length_census() const noexcept { return distinct_by_length_; }

 private:
  void build_census();

  Table table_;
  std::map<std::size_t, std::uint64_t> distinct_by_length_;
  std::map<std::size_t, std::uint64_t> tokens_by_length_;
  std::uint64_t doc_count_ = 0;
  Alphabet alphabet_;
};

inline Index build_index(const Corpus& corpus) { return Index(corpus); }

// Snapshot: "A=<int> docs=<int>" header, then "token doc_freq occ_count" lines
// sorted by token. Loading needs the alphabet because the header stores only
// its size; the default is the first A Latin letters.
void write_index_snapshot(std::ostream& out, const Index& index);
Index read_index_snapshot(std::istream& in);
Index read_index_snapshot(std::istream& in, const Alphabet& alphabet);

}  // namespace crossover
