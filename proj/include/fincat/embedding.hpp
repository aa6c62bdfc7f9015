// Context embeddings for a numeral: the provider contract and its three
// backends (hashed, remote HTTP, precomputed cache).
#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fincat/text.hpp"

namespace fincat {

inline constexpr int kDefaultDim = 768;

/// Fixed-length, finite vector.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  /// Throws InvalidArgument on an empty or non-finite input.
  explicit EmbeddingVector(std::vector<double> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

enum class EmbedderKind { kHashed, kRemote, kCached };

std::string_view to_string(EmbedderKind kind);
/// Throws InvalidArgument for anything but "hashed", "remote", "cached".
EmbedderKind parse_embedder_kind(std::string_view name);

/// Identity of the vector space a model was trained in.
struct EmbedderId {
  EmbedderKind kind = EmbedderKind::kHashed;
  int dim = kDefaultDim;
  std::uint64_t seed = 0;  // hashed only
  std::string endpoint;    // remote only

  friend bool operator==(const EmbedderId&, const EmbedderId&) = default;
};

/// Whether vectors from `provider` may be scored by a model trained under
/// `model`. Kind and dim must agree; hashed also needs the same seed. The
/// remote endpoint is a location, not part of the identity.
bool compatible(const EmbedderId& model, const EmbedderId& provider);

std::string describe(const EmbedderId& id);

/// Key of a precomputed vector: the record and the numeral's mention id
/// within that record's text.
struct CacheKey {
  std::string record_id;
  std::size_t mention_id = 0;

  friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

/// The provider contract. Implementations must be deterministic for a fixed
/// configuration and safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual EmbedderId id() const = 0;

  /// `key` identifies the mention for backends that look vectors up rather
  /// than compute them; the others ignore it.
  virtual EmbeddingVector embed(const ContextWindow& window,
                                const std::optional<CacheKey>& key) const = 0;

  EmbeddingVector embed(const ContextWindow& window) const {
    return embed(window, std::nullopt);
  }
};

// ---------------------------------------------------------------------------
// Hashed backend

inline constexpr char kFeatureSeparator = '\x1f';

/// FNV-1a 64 over the 8 seed bytes (big-endian) followed by `bytes`.
std::uint64_t seeded_fnv1a64(std::uint64_t seed, std::string_view bytes);

/// The serialized feature set of a window, sorted and deduplicated:
///   N<US>numeral
///   C<US>word<US>offset   offset = position relative to the numeral,
///                         clamped to [-6, 6], plain decimal ("-2", "3")
///   G<US>trigram          code-point 3-grams of "^" + numeral + "$"
std::vector<std::string> hashed_features(const ContextWindow& window);

/// Signed feature hashing of hashed_features() into `dim` buckets,
/// L2-normalized. Throws InvalidArgument if dim < 2.
EmbeddingVector hashed_embed(const ContextWindow& window, int dim, std::uint64_t seed);

class HashedEmbedder final : public EmbeddingProvider {
 public:
  explicit HashedEmbedder(int dim = kDefaultDim, std::uint64_t seed = 0);

  EmbedderId id() const override;
  using EmbeddingProvider::embed;
  EmbeddingVector embed(const ContextWindow& window,
                        const std::optional<CacheKey>& key) const override;

 private:
  int dim_;
  std::uint64_t seed_;
};

// ---------------------------------------------------------------------------
// Remote backend

/// POSTs {"window_words", "numeral_pos", "dim"} to `endpoint` + "/embed" and
/// expects {"vector": [...]} with exactly `dim` numbers.
///
/// Throws TransportError on connection failure or timeout, ProviderError on
/// a non-2xx status and ProtocolError on a malformed or mis-sized body.
EmbeddingVector fetch_remote_embedding(const std::string& endpoint,
                                       const ContextWindow& window, int dim,
                                       std::chrono::milliseconds timeout);

class RemoteEmbedder final : public EmbeddingProvider {
 public:
  RemoteEmbedder(std::string endpoint, int dim = kDefaultDim,
                 std::chrono::milliseconds timeout = std::chrono::seconds(10));

  EmbedderId id() const override;
  using EmbeddingProvider::embed;
  EmbeddingVector embed(const ContextWindow& window,
                        const std::optional<CacheKey>& key) const override;

 private:
  std::string endpoint_;
  int dim_;
  std::chrono::milliseconds timeout_;
};

// ---------------------------------------------------------------------------
// Cached backend

struct EmbeddingCache {
  int dim = 0;  // 0 only for an empty file without a header
  std::map<CacheKey, EmbeddingVector> entries;
};

/// Reads the cache format:
///   #dim=<int>
///   record_id<TAB>mention_id<TAB>v1,v2,...,v_dim
/// Throws LoadError naming the offending line.
EmbeddingCache load_cached_embeddings(const std::string& path);

void save_cached_embeddings(const EmbeddingCache& cache, const std::string& path);

class CachedEmbedder final : public EmbeddingProvider {
 public:
  explicit CachedEmbedder(EmbeddingCache cache);
  /// An empty cache has no dim of its own; `dim` supplies it.
  CachedEmbedder(EmbeddingCache cache, int dim);

  EmbedderId id() const override;
  using EmbeddingProvider::embed;
  /// Throws CacheMiss when `key` is absent or not in the cache.
  EmbeddingVector embed(const ContextWindow& window,
                        const std::optional<CacheKey>& key) const override;

  std::size_t size() const noexcept { return cache_.entries.size(); }

 private:
  EmbeddingCache cache_;
};

}  // namespace fincat
