#include <set>
#include <sstream>

#include "crossover/corpus.hpp"
#include "crossover/errors.hpp"
#include "crossover/index.hpp"
#include "crossover/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crossover;

namespace {

Corpus example_corpus() { return Corpus(std::vector<Document>{{"ab", "cd", "ab"}, {"ab"}, {"ef"}}); }

Corpus random_corpus(std::uint64_t seed, std::size_t max_tokens, std::size_t alphabet_size) {
  Stream rng(seed, StreamDomain::kReplication, {7});
  const auto alphabet = Alphabet::latin(alphabet_size);
  std::vector<Document> docs(1 + rng.below(20));
  const std::size_t tokens = rng.below(max_tokens + 1);
  for (std::size_t i = 0; i < tokens; ++i) {
    Token t(1 + rng.below(3), 'a');
    for (auto& c : t) c = alphabet.at(rng.below(alphabet_size));
    docs[rng.below(docs.size())].push_back(std::move(t));
  }
  return Corpus(std::move(docs), alphabet);
}

}  // namespace

TEST_SUITE("index") {
TEST_CASE("build and lookup on the worked example") {
  const Index index(example_corpus());
  REQUIRE(index.find("ab") != nullptr);
  CHECK(*index.find("ab") == TokenStats{2, 3});
  CHECK(index.lookup("ab") == 2);
  CHECK(index.lookup("zz") == 0);
  CHECK(index.lookup("ef") == 1);
  CHECK(index.distinct_by_length(2) == 3);
  CHECK(index.distinct_by_length(5) == 0);
  CHECK(index.tokens_by_length(2) == 5);
  CHECK(index.doc_count() == 3);
  CHECK_THROWS_AS(index.lookup("a$"), InvalidQuery);
  CHECK_THROWS_AS(index.lookup(""), InvalidQuery);
  CHECK_THROWS_AS(index.lookup("AB"), InvalidQuery);
}

TEST_CASE("empty corpus") {
  const Index index(Corpus{});
  CHECK(index.table().empty());
  for (std::size_t n = 1; n < 10; ++n) CHECK(index.distinct_by_length(n) == 0);
  CHECK(index.lookup("abc") == 0);
}

TEST_CASE("uniform corpus census equals enumeration") {
  const auto corpus = generate_uniform_corpus(2, 1, 10, 3, 4);
  const Index index(corpus);
  CHECK(index.distinct_by_length(1) == oracle::distinct_of_length(corpus, 1));
}

TEST_CASE("500-token corpus table equals brute-force scan") {
  CorpusSpec spec;
  spec.vocab_size = 60;
  spec.total_tokens = 500;
  spec.doc_count = 13;
  spec.word_length_range = {1, 3};
  spec.alphabet = Alphabet::latin(4);
  spec.typo_prob = 0.3;
  spec.inject_prob = 0.1;
  const auto corpus = generate_corpus(spec);
  const Index index(corpus);
  const auto brute = oracle::scan_counts(corpus);
  REQUIRE(index.table().size() == brute.size());
  for (const auto& [tok, c] : brute) {
    const auto* stats = index.find(tok);
    REQUIRE(stats != nullptr);
    CHECK(stats->doc_freq == c.docs);
    CHECK(stats->occ_count == c.occurrences);
  }
}

TEST_CASE("lookups on a 30-token corpus equal naive scans") {
  const auto corpus = generate_uniform_corpus(3, 2, 30, 6, 8);
  const Index index(corpus);
  for (const auto& doc : corpus.documents())
    for (const auto& t : doc) CHECK(index.lookup(t) == oracle::naive_doc_count(corpus, t));
}

TEST_CASE("index invariants on random corpora") {
  for (std::uint64_t trial = 0; trial < 60; ++trial) {
    const auto corpus = random_corpus(trial, 400, 3);
    const Index index(corpus);
    std::uint64_t census_total = 0;
    for (const auto& [len, types] : index.length_census()) census_total += types;
    CHECK(census_total == index.distinct_count());

    std::uint64_t df_sum = 0;
    for (const auto& [tok, stats] : index.table()) {
      REQUIRE(stats.doc_freq >= 1);
      REQUIRE(stats.doc_freq <= index.doc_count());
      REQUIRE(stats.doc_freq <= stats.occ_count);
      df_sum += stats.doc_freq;
    }
    std::uint64_t per_doc_distinct = 0;
    for (const auto& doc : corpus.documents()) per_doc_distinct += std::set<std::string>(doc.begin(), doc.end()).size();
    CHECK(df_sum == per_doc_distinct);

    for (std::size_t n = 1; n <= 3; ++n) {
      std::uint64_t count = 0;
      for (const auto& [tok, stats] : index.table()) count += tok.size() == n;
      CHECK(count == index.distinct_by_length(n));
    }
  }
}

TEST_CASE("occupied fraction is D_N / A^N") {
  const auto corpus = generate_uniform_corpus(26, 3, 17576, 10, 1);
  const Index index(corpus);
  CHECK(index.occupied_fraction(3) == doctest::Approx(static_cast<double>(index.distinct_by_length(3)) / 17576.0).epsilon(1e-14));
  CHECK(index.occupied_fraction(4) == 0.0);
}

TEST_CASE("snapshot format is sorted and reloads") {
  const Index index(example_corpus());
  std::ostringstream out;
  write_index_snapshot(out, index);
  CHECK(out.str() == "A=26 docs=3\nab 2 3\ncd 1 1\nef 1 1\n");

  std::istringstream in(out.str());
  const auto back = read_index_snapshot(in);
  CHECK(back.table() == index.table());
  CHECK(back.doc_count() == 3);
  CHECK(back.distinct_by_length(2) == 3);

  std::istringstream bad_header("docs=3\n");
  CHECK_THROWS_AS(read_index_snapshot(bad_header), ParseError);
  std::istringstream bad_row("A=26 docs=3\nab 2\n");
  CHECK_THROWS_AS(read_index_snapshot(bad_row), ParseError);
  std::istringstream bad_counts("A=26 docs=1\nab 2 3\n");
  CHECK_THROWS_AS(read_index_snapshot(bad_counts), ParseError);
}
}
