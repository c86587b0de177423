#include "crossover/index.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "crossover/errors.hpp"
#include "crossover/util.hpp"

namespace crossover {

Index::Index(const Corpus& corpus) : doc_count_(corpus.doc_count()), alphabet_(corpus.alphabet()) {
  // last_doc marks the most recent document that already counted the token.
  std::unordered_map<std::string, std::uint64_t> last_doc;
  const auto& docs = corpus.documents();
  for (std::uint64_t d = 0; d < docs.size(); ++d) {
    for (const auto& tok : docs[d]) {
      auto [it, inserted] = table_.try_emplace(tok);
      auto& stats = it->second;
      ++stats.occ_count;
      auto [seen, fresh] = last_doc.try_emplace(tok, d);
      if (fresh || seen->second != d) {
        seen->second = d;
        ++stats.doc_freq;
      }
    }
  }
  build_census();
}

Index::Index(Table table, std::uint64_t doc_count, Alphabet alphabet)
    : table_(std::move(table)), doc_count_(doc_count), alphabet_(std::move(alphabet)) {
  for (const auto& [tok, stats] : table_) {
    if (!alphabet_.accepts(tok)) throw InvalidSpec("index token '" + tok + "' is outside the alphabet");
    if (stats.doc_freq < 1 || stats.doc_freq > doc_count_ || stats.doc_freq > stats.occ_count)
      throw InvalidSpec("inconsistent counts for token '" + tok + "'");
  }
  build_census();
}

void Index::build_census() {
  for (const auto& [tok, stats] : table_) {
    ++distinct_by_length_[tok.size()];
    tokens_by_length_[tok.size()] += stats.occ_count;
  }
}

const TokenStats* Index::find(std::string_view token) const {
  const auto it = table_.find(std::string(token));
  return it == table_.end() ? nullptr : &it->second;
}

std::uint64_t Index::lookup(std::string_view query) const {
  if (!alphabet_.accepts(query)) throw InvalidQuery("query '" + std::string(query) + "' is empty or outside the alphabet");
  const auto* stats = find(query);
  return stats ? stats->doc_freq : 0;
}

std::uint64_t Index::distinct_by_length(std::size_t n) const {
  const auto it = distinct_by_length_.find(n);
  return it == distinct_by_length_.end() ? 0 : it->second;
}

std::uint64_t Index::tokens_by_length(std::size_t n) const {
  const auto it = tokens_by_length_.find(n);
  return it == tokens_by_length_.end() ? 0 : it->second;
}

double Index::occupied_fraction(std::size_t n) const {
  const double types = static_cast<double>(distinct_by_length(n));
  if (types == 0.0) return 0.0;
  return std::exp(std::log(types) - static_cast<double>(n) * std::log(static_cast<double>(alphabet_.size())));
}

void write_index_snapshot(std::ostream& out, const Index& index) {
  std::vector<const Index::Table::value_type*> rows;
  rows.reserve(index.table().size());
  for (const auto& row : index.table()) rows.push_back(&row);
  std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) { return a->first < b->first; });
  out << "A=" << index.alphabet().size() << " docs=" << index.doc_count() << '\n';
  for (const auto* row : rows) out << row->first << ' ' << row->second.doc_freq << ' ' << row->second.occ_count << '\n';
}

namespace {

struct SnapshotHeader {
  std::uint64_t alphabet_size = 0;
  std::uint64_t docs = 0;
};

SnapshotHeader parse_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing snapshot header", 1);
  const auto sp = line.find(' ');
  if (line.rfind("A=", 0) != 0 || sp == std::string::npos || line.compare(sp + 1, 5, "docs=") != 0)
    throw ParseError("snapshot header must be 'A=<int> docs=<int>'", 1);
  try {
    return {parse_u64(line.substr(2, sp - 2)), parse_u64(line.substr(sp + 6))};
  } catch (const ParseError& e) {
    throw ParseError(e.what(), 1);
  }
}

Index parse_body(std::istream& in, const SnapshotHeader& header, const Alphabet& alphabet) {
  if (alphabet.size() != header.alphabet_size) throw ParseError("snapshot alphabet size does not match", 1);
  Index::Table table;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream row(line);
    std::string tok, extra;
    std::uint64_t df = 0, occ = 0;
    if (!(row >> tok >> df >> occ) || (row >> extra)) throw ParseError("expected 'token doc_freq occ_count'", lineno);
    if (!alphabet.accepts(tok)) throw ParseError("token outside the alphabet", lineno);
    if (!table.emplace(tok, TokenStats{df, occ}).second) throw ParseError("duplicate token", lineno);
  }
  try {
    return Index(std::move(table), header.docs, alphabet);
  } catch (const InvalidSpec& e) {
    throw ParseError(e.what());
  }
}

}  // namespace

Index read_index_snapshot(std::istream& in) {
  const auto header = parse_header(in);
  if (header.alphabet_size < 1 || header.alphabet_size > 26)
    throw ParseError("snapshot alphabet size needs an explicit alphabet", 1);
  return parse_body(in, header, Alphabet::latin(header.alphabet_size));
}

Index read_index_snapshot(std::istream& in, const Alphabet& alphabet) {
  return parse_body(in, parse_header(in), alphabet);
}

}  // namespace crossover
