// Text in, one verdict per numeral out.
#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fincat/classifier.hpp"
#include "fincat/embedding.hpp"
#include "fincat/error.hpp"
#include "fincat/text.hpp"

namespace fincat {

struct AnalysisRow {
  std::string numeral;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  ClaimLabel label = ClaimLabel::kOutOfClaim;
  double probability = 0.5;

  friend bool operator==(const AnalysisRow&, const AnalysisRow&) = default;
};

struct AnalysisResult {
  std::vector<AnalysisRow> rows;  // text order
  std::chrono::microseconds elapsed{0};
  std::string model_fingerprint;

  long long elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  }
};

/// Embedding failed for one mention of the analyzed text.
class AnalysisError : public EmbeddingError {
 public:
  AnalysisError(std::size_t mention_id, const std::string& surface, const std::string& cause)
      : EmbeddingError("embedding failed for mention " + std::to_string(mention_id) + " '" +
                       surface + "': " + cause),
        mention_id_(mention_id) {}

  std::size_t mention_id() const noexcept { return mention_id_; }

 private:
  std::size_t mention_id_;
};

/// A model bound to a provider. Immutable after construction, so one
/// instance can serve concurrent callers.
class Analyzer {
 public:
  /// Throws InvalidArgument when the provider's vectors do not fit the model.
  Analyzer(LogisticModel model, std::shared_ptr<const EmbeddingProvider> provider,
           int k = kDefaultWindow);

  /// `record_id` keys cached-embedding lookups; other backends ignore it.
  AnalysisResult analyze(std::string_view text,
                         const std::optional<std::string>& record_id = std::nullopt) const;

  const LogisticModel& model() const noexcept { return model_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }
  int window() const noexcept { return k_; }

 private:
  LogisticModel model_;
  std::shared_ptr<const EmbeddingProvider> provider_;
  EmbedderId provider_id_;
  int k_;
  std::string fingerprint_;
};

/// One-shot form of Analyzer::analyze.
AnalysisResult analyze(std::string_view text, const LogisticModel& model,
                       std::shared_ptr<const EmbeddingProvider> provider,
                       int k = kDefaultWindow);

/// Three-column table, probabilities to 4 decimals.
std::string render_table(const AnalysisResult& result);
/// The /analyze response body.
std::string result_to_json(const AnalysisResult& result);

}  // namespace fincat
