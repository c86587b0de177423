#include "crossover/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>

#include "crossover/errors.hpp"
#include "crossover/rng.hpp"
#include "crossover/util.hpp"

namespace crossover {

Alphabet::Alphabet() : Alphabet("abcdefghijklmnopqrstuvwxyz") {}

Alphabet::Alphabet(std::string letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw InvalidSpec("alphabet must not be empty");
  for (char c : letters_) {
    auto& slot = member_[static_cast<unsigned char>(c)];
    if (slot) throw InvalidSpec(std::string("duplicate alphabet character '") + c + "'");
    if (c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == ',' || c == '=')
      throw InvalidSpec("alphabet may not contain separator characters");
    slot = true;
  }
}

Alphabet Alphabet::latin(std::size_t size) {
  if (size < 1 || size > 26) throw InvalidSpec("latin alphabet size must be in [1, 26]");
  return Alphabet(std::string("abcdefghijklmnopqrstuvwxyz").substr(0, size));
}

std::size_t Alphabet::index_of(char c) const noexcept {
  const auto pos = letters_.find(c);
  return pos == std::string::npos ? letters_.size() : pos;
}

bool Alphabet::accepts(std::string_view token) const noexcept {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(), [this](char c) { return contains(c); });
}

Corpus::Corpus(std::vector<Document> documents, Alphabet alphabet)
    : documents_(std::move(documents)), alphabet_(std::move(alphabet)) {
  for (const auto& doc : documents_) token_count_ += doc.size();
}

void CorpusSpec::validate() const {
  if (vocab_size < 1) throw InvalidSpec("vocab_size must be >= 1");
  if (!(zipf_exponent >= 0.0) || !std::isfinite(zipf_exponent))
    throw InvalidSpec("zipf_exponent must be a finite nonnegative number");
  if (doc_count < 1) throw InvalidSpec("doc_count must be >= 1");
  if (word_length_range.first < 1 || word_length_range.first > word_length_range.second)
    throw InvalidSpec("word_length_range must satisfy 1 <= lo <= hi");
  if (!(typo_prob >= 0.0 && typo_prob <= 1.0)) throw InvalidSpec("typo_prob must be in [0, 1]");
  if (!(inject_prob >= 0.0 && inject_prob <= 1.0)) throw InvalidSpec("inject_prob must be in [0, 1]");
}

CorpusSpec parse_corpus_spec(std::istream& in) {
  CorpusSpec spec;
  const auto entries = parse_key_values(in);
  for (const auto& [key, entry] : entries) {
    const auto& [value, line] = entry;
    try {
      if (key == "vocab_size") {
        spec.vocab_size = parse_u64(value);
      } else if (key == "zipf_exponent") {
        spec.zipf_exponent = parse_double(value);
      } else if (key == "total_tokens") {
        spec.total_tokens = parse_u64(value);
      } else if (key == "doc_count") {
        spec.doc_count = parse_u64(value);
      } else if (key == "word_length_range") {
        spec.word_length_range = parse_range(value);
      } else if (key == "typo_prob") {
        spec.typo_prob = parse_double(value);
      } else if (key == "inject_prob") {
        spec.inject_prob = parse_double(value);
      } else if (key == "seed") {
        spec.seed = parse_u64(value);
      } else if (key == "alphabet") {
        spec.alphabet = Alphabet(value);
      } else {
        throw ParseError("unknown corpus spec key '" + key + "'", line);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(key + ": " + e.what(), line);
    }
  }
  spec.validate();
  return spec;
}

CorpusSpec read_corpus_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_corpus_spec(in);
}

void write_corpus_spec(std::ostream& out, const CorpusSpec& spec) {
  out << "vocab_size=" << spec.vocab_size << '\n'
      << "zipf_exponent=" << format_real(spec.zipf_exponent, 17) << '\n'
      << "total_tokens=" << spec.total_tokens << '\n'
      << "doc_count=" << spec.doc_count << '\n'
      << "word_length_range=" << spec.word_length_range.first << ',' << spec.word_length_range.second << '\n'
      << "typo_prob=" << format_real(spec.typo_prob, 17) << '\n'
      << "inject_prob=" << format_real(spec.inject_prob, 17) << '\n'
      << "seed=" << spec.seed << '\n'
      << "alphabet=" << spec.alphabet.letters() << '\n';
}

std::vector<double> zipf_probabilities(std::uint64_t vocab_size, double exponent) {
  if (vocab_size < 1) throw InvalidSpec("zipf_probabilities: vocabulary size must be >= 1");
  if (!(exponent >= 0.0) || !std::isfinite(exponent))
    throw InvalidSpec("zipf_probabilities: exponent must be finite and nonnegative");
  std::vector<double> p(vocab_size);
  for (std::uint64_t k = 0; k < vocab_size; ++k) p[k] = std::pow(static_cast<double>(k + 1), -exponent);
  // Summing smallest-first keeps the normalization error near one ulp.
  double total = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) total += *it;
  for (double& x : p) x /= total;
  return p;
}

Token apply_typo_op(std::string_view word, const TypoOp& op) {
  const std::size_t n = word.size();
  Token out(word);
  switch (op.kind) {
    case TypoKind::kSubstitution:
      if (op.position >= n) throw InvalidOp("substitution position out of range");
      if (!op.replacement) throw InvalidOp("substitution needs a replacement character");
      out[op.position] = *op.replacement;
      break;
    case TypoKind::kDeletion:
      if (op.position >= n) throw InvalidOp("deletion position out of range");
      if (n == 1) throw InvalidOp("deletion would produce an empty token");
      out.erase(op.position, 1);
      break;
    case TypoKind::kInsertion:
      if (op.position > n) throw InvalidOp("insertion position out of range");
      if (!op.replacement) throw InvalidOp("insertion needs a character");
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(op.position), *op.replacement);
      break;
    case TypoKind::kTransposition:
      if (n < 2 || op.position + 1 >= n) throw InvalidOp("transposition position out of range");
      std::swap(out[op.position], out[op.position + 1]);
      break;
  }
  return out;
}

namespace {

Token random_token(Stream& rng, const Alphabet& alphabet, std::size_t length) {
  Token t(length, '\0');
  for (auto& c : t) c = alphabet.at(rng.below(alphabet.size()));
  return t;
}

std::size_t random_length(Stream& rng, std::pair<std::size_t, std::size_t> range) {
  return range.first + rng.below(range.second - range.first + 1);
}

// Draws one edit that changes the word (edit distance exactly 1). Insertion is
// always available, so some kind is always valid.
TypoOp draw_typo(Stream& rng, std::string_view word, const Alphabet& alphabet) {
  const std::size_t n = word.size();
  std::vector<std::size_t> swappable;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (word[i] != word[i + 1]) swappable.push_back(i);

  TypoKind kinds[4];
  std::size_t nkinds = 0;
  if (alphabet.size() >= 2) kinds[nkinds++] = TypoKind::kSubstitution;
  if (n >= 2) kinds[nkinds++] = TypoKind::kDeletion;
  kinds[nkinds++] = TypoKind::kInsertion;
  if (!swappable.empty()) kinds[nkinds++] = TypoKind::kTransposition;

  TypoOp op{kinds[rng.below(nkinds)], 0, std::nullopt};
  switch (op.kind) {
    case TypoKind::kSubstitution: {
      op.position = rng.below(n);
      // Uniform over the letters that differ from the current one.
      std::size_t r = rng.below(alphabet.size() - 1);
      if (r >= alphabet.index_of(word[op.position])) ++r;
      op.replacement = alphabet.at(r);
      break;
    }
    case TypoKind::kDeletion:
      op.position = rng.below(n);
      break;
    case TypoKind::kInsertion:
      op.position = rng.below(n + 1);
      op.replacement = alphabet.at(rng.below(alphabet.size()));
      break;
    case TypoKind::kTransposition:
      op.position = swappable[rng.below(swappable.size())];
      break;
  }
  return op;
}

std::vector<Document> round_robin_documents(std::uint64_t token_count, std::uint64_t doc_count) {
  std::vector<Document> docs(doc_count);
  for (std::uint64_t d = 0; d < doc_count; ++d)
    docs[d].resize(token_count / doc_count + (d < token_count % doc_count ? 1 : 0));
  return docs;
}

// Runs fn(i) for i in [0, count) on a few threads. fn must only touch slot i.
template <typename Fn>
void parallel_for(std::uint64_t count, Fn fn) {
  const std::uint64_t workers =
      count < 65536 ? 1 : std::min<std::uint64_t>(std::max(1u, std::thread::hardware_concurrency()), 8);
  if (workers == 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  const std::uint64_t chunk = (count + workers - 1) / workers;
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t lo = w * chunk, hi = std::min(count, lo + chunk);
    threads.emplace_back([lo, hi, &fn] {
      for (std::uint64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

std::vector<Token> generate_vocabulary(const CorpusSpec& spec) {
  spec.validate();
  std::vector<Token> vocab(spec.vocab_size);
  for (std::uint64_t k = 0; k < spec.vocab_size; ++k) {
    Stream rng(spec.seed, StreamDomain::kVocabulary, {k});
    vocab[k] = random_token(rng, spec.alphabet, random_length(rng, spec.word_length_range));
  }
  return vocab;
}

Corpus generate_corpus(const CorpusSpec& spec, TypoTrace* trace) {
  spec.validate();
  const auto vocab = generate_vocabulary(spec);
  auto cdf = zipf_probabilities(spec.vocab_size, spec.zipf_exponent);
  for (std::size_t k = 1; k < cdf.size(); ++k) cdf[k] += cdf[k - 1];
  cdf.back() = 1.0;

  auto docs = round_robin_documents(spec.total_tokens, spec.doc_count);
  auto make_token = [&](std::uint64_t i, TypoTrace* sink) {
    Stream rng(spec.seed, StreamDomain::kToken, {i});
    Token& slot = docs[i % spec.doc_count][i / spec.doc_count];
    if (rng.bernoulli(spec.inject_prob)) {
      slot = random_token(rng, spec.alphabet, random_length(rng, spec.word_length_range));
      return;
    }
    const double u = rng.uniform();
    const auto rank = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    const Token& word = vocab[std::min(rank, vocab.size() - 1)];
    if (rng.bernoulli(spec.typo_prob)) {
      slot = apply_typo_op(word, draw_typo(rng, word, spec.alphabet));
      if (sink) sink->edits.emplace_back(word, slot);
      return;
    }
    slot = word;
  };

  if (trace) {
    for (std::uint64_t i = 0; i < spec.total_tokens; ++i) make_token(i, trace);
  } else {
    parallel_for(spec.total_tokens, [&](std::uint64_t i) { make_token(i, nullptr); });
  }
  return Corpus(std::move(docs), spec.alphabet);
}

namespace {

void fill_uniform(std::vector<Document>& docs, std::uint64_t offset, const Alphabet& alphabet, std::size_t length,
                  std::uint64_t count, std::uint64_t seed) {
  const std::uint64_t doc_count = docs.size();
  parallel_for(count, [&](std::uint64_t i) {
    Stream rng(seed, StreamDomain::kUniformToken, {length, i});
    const std::uint64_t slot = offset + i;
    docs[slot % doc_count][slot / doc_count] = random_token(rng, alphabet, length);
  });
}

void check_uniform_args(std::size_t alphabet_size, std::size_t length, std::uint64_t doc_count) {
  if (alphabet_size < 1 || alphabet_size > 26) throw InvalidSpec("alphabet size must be in [1, 26]");
  if (length < 1) throw InvalidSpec("token length must be >= 1");
  if (doc_count < 1) throw InvalidSpec("doc_count must be >= 1");
}

}  // namespace

Corpus generate_uniform_corpus(std::size_t alphabet_size, std::size_t length, std::uint64_t token_count,
                               std::uint64_t doc_count, std::uint64_t seed) {
  check_uniform_args(alphabet_size, length, doc_count);
  const auto alphabet = Alphabet::latin(alphabet_size);
  auto docs = round_robin_documents(token_count, doc_count);
  fill_uniform(docs, 0, alphabet, length, token_count, seed);
  return Corpus(std::move(docs), alphabet);
}

Corpus generate_null_reservoir(std::size_t alphabet_size, std::size_t min_length, std::size_t max_length,
                               std::uint64_t tokens_per_length, std::uint64_t doc_count, std::uint64_t seed) {
  check_uniform_args(alphabet_size, min_length, doc_count);
  if (max_length < min_length) throw InvalidSpec("null reservoir length range is empty");
  const auto alphabet = Alphabet::latin(alphabet_size);
  const std::uint64_t lengths = max_length - min_length + 1;
  const std::uint64_t total = lengths * tokens_per_length;
  auto docs = round_robin_documents(total, doc_count);
  for (std::uint64_t k = 0; k < lengths; ++k)
    fill_uniform(docs, k * tokens_per_length, alphabet, min_length + k, tokens_per_length, seed);
  return Corpus(std::move(docs), alphabet);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& doc : corpus.documents()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      if (i) out << ' ';
      out << doc[i];
    }
    out << '\n';
  }
}

Corpus read_corpus(std::istream& in, const Alphabet& alphabet) {
  std::vector<Document> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    Document doc;
    std::size_t start = 0;
    while (start < line.size()) {
      const auto end = std::min(line.find(' ', start), line.size());
      const std::string_view tok(line.data() + start, end - start);
      if (tok.empty()) throw ParseError("empty token (repeated or edge space)", lineno);
      if (!alphabet.accepts(tok)) throw ParseError("token '" + std::string(tok) + "' has characters outside the alphabet", lineno);
      doc.emplace_back(tok);
      start = end + 1;
      if (end + 1 == line.size()) throw ParseError("trailing space", lineno);
    }
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(docs), alphabet);
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_corpus(out, corpus);
  if (!out) throw IoError("write failed: " + path.string());
}

Corpus load_corpus(const std::filesystem::path& path, const Alphabet& alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_corpus(in, alphabet);
}

}  // namespace crossover
