#include <cmath>
#include <set>
#include <sstream>

#include "crossover/corpus.hpp"
#include "crossover/errors.hpp"
#include "crossover/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crossover;

TEST_SUITE("corpus") {
TEST_CASE("zipf_probabilities small cases") {
  const auto one = zipf_probabilities(1, 3.7);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(1.0).epsilon(1e-15));

  const auto flat = zipf_probabilities(3, 0.0);
  for (double p : flat) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  // (1, 1/2) / (3/2)
  const auto two = zipf_probabilities(2, 1.0);
  CHECK(two[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(two[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS(zipf_probabilities(0, 1.0), InvalidSpec);
  CHECK_THROWS_AS(zipf_probabilities(5, -0.1), InvalidSpec);
}

TEST_CASE("zipf_probabilities normalizes and is non-increasing") {
  for (std::uint64_t v : {1ull, 2ull, 17ull, 1000ull, 100000ull, 1000000ull}) {
    for (double s : {0.0, 0.5, 1.0, 1.7, 3.0}) {
      const auto p = zipf_probabilities(v, s);
      long double sum = 0;
      for (double x : p) sum += x;
      CHECK(std::abs(static_cast<double>(sum) - 1.0) <= 1e-12);
      CHECK(std::is_sorted(p.rbegin(), p.rend()));
    }
  }
}

TEST_CASE("apply_typo_op edits") {
  CHECK(apply_typo_op("word", {TypoKind::kDeletion, 1, std::nullopt}) == "wrd");
  CHECK(apply_typo_op("ab", {TypoKind::kTransposition, 0, std::nullopt}) == "ba");
  CHECK(apply_typo_op("cat", {TypoKind::kSubstitution, 2, 'r'}) == "car");
  CHECK(apply_typo_op("cat", {TypoKind::kInsertion, 3, 's'}) == "cats");
  CHECK(apply_typo_op("cat", {TypoKind::kInsertion, 0, 's'}) == "scat");
}

TEST_CASE("apply_typo_op rejects invalid ops") {
  CHECK_THROWS_AS(apply_typo_op("a", {TypoKind::kDeletion, 0, std::nullopt}), InvalidOp);
  CHECK_THROWS_AS(apply_typo_op("abc", {TypoKind::kDeletion, 3, std::nullopt}), InvalidOp);
  CHECK_THROWS_AS(apply_typo_op("abc", {TypoKind::kSubstitution, 5, 'x'}), InvalidOp);
  CHECK_THROWS_AS(apply_typo_op("abc", {TypoKind::kSubstitution, 1, std::nullopt}), InvalidOp);
  CHECK_THROWS_AS(apply_typo_op("abc", {TypoKind::kInsertion, 4, 'x'}), InvalidOp);
  CHECK_THROWS_AS(apply_typo_op("abc", {TypoKind::kTransposition, 2, std::nullopt}), InvalidOp);
  CHECK_THROWS_AS(apply_typo_op("a", {TypoKind::kTransposition, 0, std::nullopt}), InvalidOp);
}

TEST_CASE("CorpusSpec validation") {
  CorpusSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.typo_prob = 1.5;
  CHECK_THROWS_AS(spec.validate(), InvalidSpec);
  spec = {};
  spec.word_length_range = {4, 3};
  CHECK_THROWS_AS(spec.validate(), InvalidSpec);
  spec = {};
  spec.word_length_range = {0, 3};
  CHECK_THROWS_AS(spec.validate(), InvalidSpec);
  spec = {};
  spec.doc_count = 0;
  CHECK_THROWS_AS(spec.validate(), InvalidSpec);
  spec = {};
  spec.vocab_size = 0;
  CHECK_THROWS_AS(generate_corpus(spec), InvalidSpec);
}

TEST_CASE("generate_corpus with no tokens gives empty documents") {
  CorpusSpec spec;
  spec.total_tokens = 0;
  spec.doc_count = 4;
  const auto corpus = generate_corpus(spec);
  CHECK(corpus.doc_count() == 4);
  CHECK(corpus.token_count() == 0);
  for (const auto& d : corpus.documents()) CHECK(d.empty());
}

TEST_CASE("generate_corpus is deterministic, round-robin and alphabet-closed") {
  CorpusSpec spec;
  spec.vocab_size = 300;
  spec.total_tokens = 100003;  // above the threading cutoff, not a multiple of D
  spec.doc_count = 7;
  spec.typo_prob = 0.2;
  spec.inject_prob = 0.1;
  spec.seed = 99;
  const auto a = generate_corpus(spec);
  const auto b = generate_corpus(spec);
  std::ostringstream sa, sb;
  write_corpus(sa, a);
  write_corpus(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(a.token_count() == spec.total_tokens);
  for (std::size_t d = 0; d < a.doc_count(); ++d)
    CHECK(a.documents()[d].size() == spec.total_tokens / 7 + (d < spec.total_tokens % 7 ? 1 : 0));
  for (const auto& doc : a.documents())
    for (const auto& t : doc) REQUIRE(spec.alphabet.accepts(t));

  // Traced (sequential) generation matches the threaded path.
  TypoTrace trace;
  const auto c = generate_corpus(spec, &trace);
  CHECK(c == a);

  spec.seed = 100;
  CHECK_FALSE(generate_corpus(spec) == a);
}

TEST_CASE("typo channel output is at edit distance exactly 1") {
  CorpusSpec spec;
  spec.vocab_size = 200;
  spec.total_tokens = 20000;
  spec.typo_prob = 1.0;
  spec.word_length_range = {1, 6};
  spec.seed = 5;
  for (std::size_t a : {1u, 2u, 26u}) {
    spec.alphabet = Alphabet::latin(a);
    TypoTrace trace;
    const auto corpus = generate_corpus(spec, &trace);
    CHECK(trace.edits.size() == spec.total_tokens);
    for (const auto& [src, out] : trace.edits) {
      REQUIRE(oracle::osa_distance(src, out) == 1);
      REQUIRE(spec.alphabet.accepts(out));
    }
  }
}

TEST_CASE("rank-1 word frequency matches Zipf normalization") {
  CorpusSpec spec;
  spec.vocab_size = 1000;
  spec.zipf_exponent = 1.0;
  spec.total_tokens = 100000;
  spec.seed = 2024;
  const auto vocab = generate_vocabulary(spec);
  const auto corpus = generate_corpus(spec);
  // Vocabulary words are random strings and may coincide; count by rank-1
  // string and add the probability of any duplicate rank.
  double p1 = 0.0;
  const double h = oracle::harmonic(1000, 1.0);  // 7.48547086055034
  for (std::size_t k = 0; k < vocab.size(); ++k)
    if (vocab[k] == vocab[0]) p1 += 1.0 / (static_cast<double>(k + 1) * h);
  std::uint64_t count = 0;
  for (const auto& doc : corpus.documents())
    for (const auto& t : doc) count += t == vocab[0];
  const double expected = p1 * 1e5;
  const double sd = std::sqrt(1e5 * p1 * (1 - p1));
  CHECK(p1 == doctest::Approx(0.13359213049244).epsilon(1e-3));
  CHECK(std::abs(static_cast<double>(count) - expected) <= 3 * sd);
}

TEST_CASE("generate_uniform_corpus basics") {
  const auto c = generate_uniform_corpus(1, 2, 3, 1, 0);
  REQUIRE(c.doc_count() == 1);
  CHECK(c.documents()[0] == Document{"aa", "aa", "aa"});

  const auto empty = generate_uniform_corpus(26, 3, 0, 5, 0);
  CHECK(empty.doc_count() == 5);
  CHECK(empty.token_count() == 0);

  CHECK(generate_uniform_corpus(26, 4, 1000, 3, 11) == generate_uniform_corpus(26, 4, 1000, 3, 11));
  CHECK_THROWS_AS(generate_uniform_corpus(0, 3, 10, 1, 0), InvalidSpec);
  CHECK_THROWS_AS(generate_uniform_corpus(26, 0, 10, 1, 0), InvalidSpec);
}

TEST_CASE("uniform corpus distinct count agrees with occupancy expectation") {
  constexpr std::uint64_t space = 26 * 26 * 26;
  // Expected distinct types A^N (1 - (1 - A^-N)^T) at T = A^N: 11110.33
  const double expected = static_cast<double>(space) * (1 - std::pow(1 - 1.0 / space, static_cast<double>(space)));
  CHECK(expected == doctest::Approx(11110.33488604647).epsilon(1e-9));
  std::vector<double> replications;
  for (std::uint64_t r = 0; r < 50; ++r)
    replications.push_back(static_cast<double>(oracle::distinct_of_length(generate_uniform_corpus(26, 3, space, 10, 1000 + r), 3)));
  const auto mv = oracle::mean_var(replications);
  const auto realized = static_cast<double>(oracle::distinct_of_length(generate_uniform_corpus(26, 3, space, 10, 7), 3));
  CHECK(std::abs(realized - expected) <= 3 * std::sqrt(mv.var));
}

TEST_CASE("null reservoir reuses the per-length uniform streams") {
  const auto reservoir = generate_null_reservoir(5, 2, 4, 30, 3, 17);
  CHECK(reservoir.token_count() == 90);
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto single = generate_uniform_corpus(5, n, 30, 1, 17);
    std::multiset<std::string> a(single.documents()[0].begin(), single.documents()[0].end()), b;
    for (const auto& doc : reservoir.documents())
      for (const auto& t : doc)
        if (t.size() == n) b.insert(t);
    CHECK(a == b);
  }
}

TEST_CASE("reservoir file format") {
  const Corpus corpus(std::vector<Document>{{"ab", "cd"}, {"ef"}});
  std::ostringstream out;
  write_corpus(out, corpus);
  CHECK(out.str() == "ab cd\nef\n");
  std::istringstream in(out.str());
  CHECK(read_corpus(in) == corpus);

  std::ostringstream empty_out;
  write_corpus(empty_out, Corpus{});
  CHECK(empty_out.str().empty());
  std::istringstream empty_in("");
  CHECK(read_corpus(empty_in).doc_count() == 0);

  std::istringstream bad("a$b\n");
  try {
    (void)read_corpus(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1u);
  }
  std::istringstream bad2("ab\ncd  ef\n");
  try {
    (void)read_corpus(bad2);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2u);
  }
  std::istringstream upper("Ab\n");
  CHECK_THROWS_AS((void)read_corpus(upper), ParseError);
}

TEST_CASE("reservoir file round trip on random corpora") {
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    Stream rng(trial, StreamDomain::kReplication, {1});
    const std::size_t a = 1 + rng.below(26);
    const auto alphabet = Alphabet::latin(a);
    std::vector<Document> docs(rng.below(6));
    for (auto& d : docs) {
      d.resize(rng.below(8));
      for (auto& t : d) {
        t.resize(1 + rng.below(7));
        for (auto& ch : t) ch = alphabet.at(rng.below(a));
      }
    }
    const Corpus corpus(docs, alphabet);
    std::stringstream io;
    write_corpus(io, corpus);
    REQUIRE(read_corpus(io, alphabet) == corpus);
  }
}

TEST_CASE("corpus spec file") {
  std::istringstream in(
      "vocab_size=500\nzipf_exponent=1.2\ntotal_tokens=2e4\ndoc_count=10\nword_length_range=2,6\n"
      "typo_prob=0.05\ninject_prob=0.01\nseed=42\n");
  const auto spec = parse_corpus_spec(in);
  CHECK(spec.vocab_size == 500);
  CHECK(spec.total_tokens == 20000);
  CHECK(spec.word_length_range == std::pair<std::size_t, std::size_t>{2, 6});
  CHECK(spec.seed == 42);
  std::stringstream round;
  write_corpus_spec(round, spec);
  const auto again = parse_corpus_spec(round);
  CHECK(again.zipf_exponent == spec.zipf_exponent);
  CHECK(again.typo_prob == spec.typo_prob);
  CHECK(again.alphabet == spec.alphabet);

  std::istringstream unknown("vocab=3\n");
  CHECK_THROWS_AS(parse_corpus_spec(unknown), ParseError);
  std::istringstream invalid("typo_prob=2\n");
  CHECK_THROWS_AS(parse_corpus_spec(invalid), InvalidSpec);
}
}
