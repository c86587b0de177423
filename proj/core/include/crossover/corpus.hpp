#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crossover {

// Ordered set of single-byte characters tokens are drawn from.
class Alphabet {
 public:
  // 26 lowercase Latin letters.
  Alphabet();
  explicit Alphabet(std::string letters);

  // First `size` lowercase letters; size in [1, 26].
  static Alphabet latin(std::size_t size);

  std::size_t size() const noexcept { return letters_.size(); }
  char at(std::size_t i) const { return letters_.at(i); }
  const std::string& letters() const noexcept { return letters_; }
  bool contains(char c) const noexcept { return member_[static_cast<unsigned char>(c)]; }
  // Position of c in the alphabet, or size() when absent.
  std::size_t index_of(char c) const noexcept;
  bool accepts(std::string_view token) const noexcept;

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.letters_ == b.letters_; }

 private:
  std::string letters_;
  bool member_[256] = {};
};

using Token = std::string;
using Document = std::vector<Token>;

// The text reservoir: an immutable list of documents.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<Document> documents, Alphabet alphabet = {});

  const std::vector<Document>& documents() const noexcept { return documents_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t doc_count() const noexcept { return documents_.size(); }
  std::size_t token_count() const noexcept { return token_count_; }

  friend bool operator==(const Corpus& a, const Corpus& b) { return a.documents_ == b.documents_; }

 private:
  std::vector<Document> documents_;
  Alphabet alphabet_;
  std::size_t token_count_ = 0;
};

struct CorpusSpec {
  std::uint64_t vocab_size = 1000;
  double zipf_exponent = 1.0;
  std::uint64_t total_tokens = 100000;
  std::uint64_t doc_count = 100;
  std::pair<std::size_t, std::size_t> word_length_range{3, 8};
  double typo_prob = 0.0;
  double inject_prob = 0.0;
  std::uint64_t seed = 0;
  Alphabet alphabet;

  // Throws InvalidSpec.
  void validate() const;
};

// Flat key=value text, keys named after the CorpusSpec fields.
// word_length_range is written "lo,hi"; alphabet is the literal letter string.
CorpusSpec parse_corpus_spec(std::istream& in);
CorpusSpec read_corpus_spec(const std::filesystem::path& path);
void write_corpus_spec(std::ostream& out, const CorpusSpec& spec);

// p_k = k^-s / sum_j j^-s for k = 1..V.
std::vector<double> zipf_probabilities(std::uint64_t vocab_size, double exponent);

enum class TypoKind { kSubstitution, kDeletion, kInsertion, kTransposition };

struct TypoOp {
  TypoKind kind;
  std::size_t position;
  // Required for substitution and insertion.
  std::optional<char> replacement;
};

// Applies a single edit. Insertion puts the character before `position`
// (position == size appends); transposition swaps position and position+1.
Token apply_typo_op(std::string_view word, const TypoOp& op);

// Source word and channel output for every token that went through the typo
// channel with an edit applied.
struct TypoTrace {
  std::vector<std::pair<Token, Token>> edits;
};

// Zipf vocabulary + typo channel + random-string injection. Token i depends
// only on (seed, i), so output is independent of generation order.
Corpus generate_corpus(const CorpusSpec& spec, TypoTrace* trace = nullptr);

// The vocabulary generate_corpus samples from, rank 1 first.
std::vector<Token> generate_vocabulary(const CorpusSpec& spec);

// T i.i.d. uniform strings of length `length`, split round-robin over D documents.
Corpus generate_uniform_corpus(std::size_t alphabet_size, std::size_t length, std::uint64_t token_count,
                               std::uint64_t doc_count, std::uint64_t seed);

// Null-model reservoir: `tokens_per_length` uniform strings at every length in
// [min_length, max_length]. Lengths use disjoint streams, so the length-N
// tokens equal those of generate_uniform_corpus(A, N, T, ., seed).
Corpus generate_null_reservoir(std::size_t alphabet_size, std::size_t min_length, std::size_t max_length,
                               std::uint64_t tokens_per_length, std::uint64_t doc_count, std::uint64_t seed);

// Reservoir file: one document per line, tokens separated by single spaces,
// each line LF-terminated.
void write_corpus(std::ostream& out, const Corpus& corpus);
Corpus read_corpus(std::istream& in, const Alphabet& alphabet = {});
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);
Corpus load_corpus(const std::filesystem::path& path, const Alphabet& alphabet = {});

}  // namespace crossover
