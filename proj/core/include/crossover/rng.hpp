#pragma once

#include <cstdint>
#include <initializer_list>

namespace crossover {

// Counter-based stream derivation. A Stream is keyed by (seed, domain, counters...)
// and its output depends on nothing else, so work can be split across threads
// or reordered without changing results. Every draw is implemented here rather
// than through <random> distributions, whose output is implementation-defined.

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Domain tags keep streams for different purposes disjoint under the same seed.
enum class StreamDomain : std::uint64_t {
  kVocabulary = 1,
  kToken = 2,
  kUniformToken = 3,
  kQuery = 4,
  kReplication = 5,
};

class Stream {
 public:
  Stream(std::uint64_t seed, StreamDomain domain, std::initializer_list<std::uint64_t> counters) noexcept {
    std::uint64_t s = mix64(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(domain));
    for (std::uint64_t c : counters) s = mix64(s ^ mix64(c + 0x632be59bd9b4e019ULL));
    state_ = s;
  }

  // SplitMix64 step.
  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform in [0, 1) with 53 bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  bool bernoulli(double p) noexcept { return p >= 1.0 || (p > 0.0 && uniform() < p); }

 private:
  std::uint64_t state_;
};

}  // namespace crossover
