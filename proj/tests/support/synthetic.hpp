// Deterministic generators for property tests and the synthetic corpus.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fincat/evaluation.hpp"

namespace fincat::testing {

/// splitmix64; portable, unlike the std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, n).
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  bool coin(double p = 0.5) { return unit() < p; }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::uint64_t state_;
};

/// Mixed words, currency and percent forms, odd whitespace.
std::string random_text(Rng& rng, std::size_t max_words = 24);

inline const std::vector<std::string> kForwardKeywords = {"expects", "will", "targets"};

/// Sentences whose target numeral is InClaim iff a forward-looking keyword
/// lies within `k` words of it.
std::vector<DatasetRecord> synthetic_corpus(std::size_t n, std::uint64_t seed, int k = 6,
                                            const std::string& id_prefix = "syn");

/// The 18-word, 2-numeral sentence used for latency and service checks.
inline constexpr const char* kSampleSentence =
    "The company expects revenue to grow 12% next year after reporting $4.5 million "
    "in net income last quarter";

}  // namespace fincat::testing
