#include "fincat/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace fincat {

Analyzer::Analyzer(LogisticModel model, std::shared_ptr<const EmbeddingProvider> provider,
                   int k)
    : model_(std::move(model)), provider_(std::move(provider)), k_(k) {
  if (!provider_) throw InvalidArgument("analyzer needs an embedding provider");
  if (k_ < 0) throw InvalidArgument("window half-width must be >= 0");
  model_.validate();
  provider_id_ = provider_->id();
  if (!compatible(model_.embedder, provider_id_)) {
    throw InvalidArgument("model was trained on " + describe(model_.embedder) +
                          " but the provider is " + describe(provider_id_));
  }
  fingerprint_ = fincat::fingerprint(model_);
}

AnalysisResult Analyzer::analyze(std::string_view text,
                                 const std::optional<std::string>& record_id) const {
  const auto started = std::chrono::steady_clock::now();

  const auto tokens = tokenize(text);
  const auto mentions = find_numerals(tokens);
  AnalysisResult result;
  result.model_fingerprint = fingerprint_;
  result.rows.reserve(mentions.size());
  for (const auto& mention : mentions) {
    const auto window = context_window(tokens, mention, k_);
    std::optional<CacheKey> key;
    if (record_id) key = CacheKey{*record_id, mention.mention_id};
    EmbeddingVector vec;
    try {
      vec = provider_->embed(window, key);
    } catch (const EmbeddingError& e) {
      throw AnalysisError(mention.mention_id, mention.token.surface, e.what());
    }
    const auto prediction = classify(model_, vec);
    result.rows.push_back({mention.token.surface, mention.token.char_start,
                           mention.token.char_end, prediction.label, prediction.probability});
  }

  result.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - started);
  return result;
}

AnalysisResult analyze(std::string_view text, const LogisticModel& model,
                       std::shared_ptr<const EmbeddingProvider> provider, int k) {
  return Analyzer(model, std::move(provider), k).analyze(text);
}

std::string render_table(const AnalysisResult& result) {
  std::size_t width = std::string_view("numeral").size();
  for (const auto& row : result.rows) width = std::max(width, row.numeral.size());

  auto pad = [](const std::string& s, std::size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
  };
  std::ostringstream out;
  out << pad("numeral", width) << "  " << pad("prediction", 12) << "  probability\n";
  for (const auto& row : result.rows) {
    char prob[32];
    std::snprintf(prob, sizeof(prob), "%.4f", row.probability);
    out << pad(row.numeral, width) << "  " << pad(std::string(to_string(row.label)), 12)
        << "  " << prob << '\n';
  }
  out << "execution time: " << result.elapsed_ms() << " ms\n";
  return out.str();
}

std::string result_to_json(const AnalysisResult& result) {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : result.rows) {
    j["rows"].push_back({{"numeral", row.numeral},
                         {"start", row.char_start},
                         {"end", row.char_end},
                         {"label", to_string(row.label)},
                         {"probability", row.probability}});
  }
  j["elapsed_ms"] = result.elapsed_ms();
  j["model"] = result.model_fingerprint;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace fincat
