#include "fincat/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fincat/error.hpp"
#include "fincat/numfmt.hpp"
#include "fincat/unicode.hpp"

namespace fincat {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgument("embedding vector must not be empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidArgument("embedding vector has a non-finite entry at index " +
                            std::to_string(i));
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("cosine of vectors with different dims");
  return dot(a.values(), b.values()) / (l2_norm(a.values()) * l2_norm(b.values()));
}

std::string_view to_string(EmbedderKind kind) {
  switch (kind) {
    case EmbedderKind::kHashed:
      return "hashed";
    case EmbedderKind::kRemote:
      return "remote";
    case EmbedderKind::kCached:
      return "cached";
  }
  return "unknown";
}

EmbedderKind parse_embedder_kind(std::string_view name) {
  if (name == "hashed") return EmbedderKind::kHashed;
  if (name == "remote") return EmbedderKind::kRemote;
  if (name == "cached") return EmbedderKind::kCached;
  throw InvalidArgument("unknown embedder '" + std::string(name) +
                        "' (expected hashed, remote or cached)");
}

bool compatible(const EmbedderId& model, const EmbedderId& provider) {
  if (model.kind != provider.kind || model.dim != provider.dim) return false;
  if (model.kind == EmbedderKind::kHashed) return model.seed == provider.seed;
  return true;
}

std::string describe(const EmbedderId& id) {
  std::string out(to_string(id.kind));
  out += "(dim=" + std::to_string(id.dim);
  if (id.kind == EmbedderKind::kHashed) out += ", seed=" + std::to_string(id.seed);
  if (id.kind == EmbedderKind::kRemote) out += ", endpoint=" + id.endpoint;
  return out + ")";
}

// ---------------------------------------------------------------------------

std::uint64_t seeded_fnv1a64(std::uint64_t seed, std::string_view bytes) {
  constexpr std::uint64_t kOffsetBasis = 0xcbf29ce484222325ULL;
  constexpr std::uint64_t kPrime = 0x100000001b3ULL;
  std::uint64_t h = kOffsetBasis;
  for (int shift = 56; shift >= 0; shift -= 8) {
    h ^= (seed >> shift) & 0xFF;
    h *= kPrime;
  }
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kPrime;
  }
  return h;
}

std::vector<std::string> hashed_features(const ContextWindow& window) {
  constexpr long kMaxOffset = 6;
  const std::string& numeral = window.numeral().surface;
  std::set<std::string> features;

  features.insert(std::string("N") + kFeatureSeparator + numeral);

  const auto center = static_cast<long>(window.numeral_pos);
  for (std::size_t i = 0; i < window.words.size(); ++i) {
    if (i == window.numeral_pos) continue;
    const long offset = std::clamp(static_cast<long>(i) - center, -kMaxOffset, kMaxOffset);
    features.insert(std::string("C") + kFeatureSeparator + window.words[i].surface +
                    kFeatureSeparator + std::to_string(offset));
  }

  std::vector<char32_t> padded{U'^'};
  for (const auto& cp : unicode::decode(numeral)) padded.push_back(cp.value);
  padded.push_back(U'$');
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    std::string gram = std::string("G") + kFeatureSeparator;
    for (std::size_t j = i; j < i + 3; ++j) unicode::append_utf8(gram, padded[j]);
    features.insert(std::move(gram));
  }

  return {features.begin(), features.end()};
}

EmbeddingVector hashed_embed(const ContextWindow& window, int dim, std::uint64_t seed) {
  if (dim < 2) throw InvalidArgument("hashed embedder needs dim >= 2");
  const auto buckets = static_cast<std::uint64_t>(dim);
  std::vector<double> values(static_cast<std::size_t>(dim), 0.0);
  for (const auto& feature : hashed_features(window)) {
    const std::uint64_t h = seeded_fnv1a64(seed, feature);
    const double sign = (h >> 63) == 0 ? 1.0 : -1.0;
    values[h % buckets] += sign;
  }
  double sum_sq = 0.0;
  for (double v : values) sum_sq += v * v;
  if (sum_sq == 0.0) {
    // Colliding features with opposite signs can cancel out.
    values[0] = 1.0;
    return EmbeddingVector(std::move(values));
  }
  const double norm = std::sqrt(sum_sq);
  for (double& v : values) v /= norm;
  return EmbeddingVector(std::move(values));
}

HashedEmbedder::HashedEmbedder(int dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim < 2) throw InvalidArgument("hashed embedder needs dim >= 2");
}

EmbedderId HashedEmbedder::id() const {
  return {EmbedderKind::kHashed, dim_, seed_, {}};
}

EmbeddingVector HashedEmbedder::embed(const ContextWindow& window,
                                      const std::optional<CacheKey>&) const {
  return hashed_embed(window, dim_, seed_);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_size(std::string_view s, std::size_t& out) {
  if (s.empty() || s.size() > 18) return false;
  out = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    out = out * 10 + static_cast<std::size_t>(c - '0');
  }
  return true;
}

}  // namespace

EmbeddingCache load_cached_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path, 0, "cannot open embedding cache");

  EmbeddingCache cache;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      constexpr std::string_view kPrefix = "#dim=";
      std::size_t dim = 0;
      if (line.rfind(kPrefix, 0) != 0 ||
          !parse_size(std::string_view(line).substr(kPrefix.size()), dim) || dim == 0 ||
          dim > 1'000'000) {
        throw LoadError(path, lineno, "expected header '#dim=<positive int>'");
      }
      cache.dim = static_cast<int>(dim);
      have_header = true;
      continue;
    }
    if (line.empty()) continue;

    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw LoadError(path, lineno, "expected 3 tab-separated fields, got " +
                                        std::to_string(fields.size()));
    }
    CacheKey key{std::string(fields[0]), 0};
    if (key.record_id.empty()) throw LoadError(path, lineno, "empty record_id");
    if (!parse_size(fields[1], key.mention_id)) {
      throw LoadError(path, lineno, "mention_id is not a non-negative integer");
    }
    const auto raw = split(fields[2], ',');
    if (raw.size() != static_cast<std::size_t>(cache.dim)) {
      throw LoadError(path, lineno, "expected " + std::to_string(cache.dim) +
                                        " values, got " + std::to_string(raw.size()));
    }
    std::vector<double> values(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (!parse_double(raw[i], values[i]) || !std::isfinite(values[i])) {
        throw LoadError(path, lineno, "bad float at position " + std::to_string(i + 1));
      }
    }
    if (cache.entries.contains(key)) {
      throw LoadError(path, lineno, "duplicate key (" + key.record_id + ", " +
                                        std::to_string(key.mention_id) + ")");
    }
    cache.entries.emplace(std::move(key), EmbeddingVector(std::move(values)));
  }
  if (in.bad()) throw LoadError(path, lineno, "read failure");
  return cache;
}

void save_cached_embeddings(const EmbeddingCache& cache, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write embedding cache " + path);
  out << "#dim=" << cache.dim << '\n';
  for (const auto& [key, vec] : cache.entries) {
    if (vec.dim() != static_cast<std::size_t>(cache.dim)) {
      throw InvalidArgument("cache entry dim does not match cache dim");
    }
    out << key.record_id << '\t' << key.mention_id << '\t';
    for (std::size_t i = 0; i < vec.dim(); ++i) {
      if (i) out << ',';
      out << format_double(vec[i]);
    }
    out << '\n';
  }
  if (!out) throw Error("failed writing embedding cache " + path);
}

CachedEmbedder::CachedEmbedder(EmbeddingCache cache) : cache_(std::move(cache)) {
  if (cache_.dim <= 0) throw InvalidArgument("embedding cache has no dim");
}

CachedEmbedder::CachedEmbedder(EmbeddingCache cache, int dim) : cache_(std::move(cache)) {
  if (cache_.dim == 0) cache_.dim = dim;
  if (cache_.dim != dim) {
    throw InvalidArgument("embedding cache dim " + std::to_string(cache_.dim) +
                          " does not match expected dim " + std::to_string(dim));
  }
  if (cache_.dim <= 0) throw InvalidArgument("embedding cache has no dim");
}

EmbedderId CachedEmbedder::id() const {
  return {EmbedderKind::kCached, cache_.dim, 0, {}};
}

EmbeddingVector CachedEmbedder::embed(const ContextWindow&,
                                      const std::optional<CacheKey>& key) const {
  if (!key) throw CacheMiss("cached embedder needs a (record_id, mention_id) key");
  auto it = cache_.entries.find(*key);
  if (it == cache_.entries.end()) {
    throw CacheMiss("no cached embedding for (" + key->record_id + ", " +
                    std::to_string(key->mention_id) + ")");
  }
  return it->second;
}

}  // namespace fincat
