#include <doctest.h>

#include <json.hpp>

#include "fincat/pipeline.hpp"
#include "support/synthetic.hpp"

using namespace fincat;

namespace {

LogisticModel model_for(const EmbedderId& id, double bias = 0.3) {
  LogisticModel m;
  m.weights.assign(static_cast<std::size_t>(id.dim), 0.0);
  for (std::size_t i = 0; i < m.weights.size(); ++i) m.weights[i] = (i % 3 == 0) ? 0.7 : -0.2;
  m.bias = bias;
  m.embedder = id;
  return m;
}

class FailingProvider final : public EmbeddingProvider {
 public:
  explicit FailingProvider(std::size_t fail_at) : fail_at_(fail_at) {}
  EmbedderId id() const override { return {EmbedderKind::kRemote, 8, 0, "http://x"}; }
  using EmbeddingProvider::embed;
  EmbeddingVector embed(const ContextWindow& window,
                        const std::optional<CacheKey>&) const override {
    if (calls_++ == fail_at_) throw TransportError("connection refused");
    return hashed_embed(window, 8, 0);
  }

 private:
  std::size_t fail_at_;
  mutable std::size_t calls_ = 0;
};

}  // namespace

TEST_CASE("no numerals gives no rows") {
  auto provider = std::make_shared<HashedEmbedder>(16, 0);
  const auto r = analyze("No numbers at all.", model_for(provider->id()), provider);
  CHECK(r.rows.empty());
  CHECK(render_table(r).find("numeral") == 0);
}

TEST_CASE("every occurrence of a repeated numeral gets a row") {
  auto provider = std::make_shared<HashedEmbedder>(16, 0);
  const auto r = analyze("Margins rose 5% and costs fell 5%", model_for(provider->id()), provider);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].numeral == "5%");
  CHECK(r.rows[1].numeral == "5%");
  CHECK(r.rows[0].char_start == 13);
  CHECK(r.rows[1].char_start == 31);
  // Different neighbours, different vectors.
  CHECK(r.rows[0].probability != r.rows[1].probability);
}

TEST_CASE("property: rows follow find_numerals in order and count") {
  auto provider = std::make_shared<HashedEmbedder>(32, 5);
  Analyzer analyzer(model_for(provider->id()), provider, 3);
  testing::Rng rng(21);
  for (int iter = 0; iter < 200; ++iter) {
    const auto text = testing::random_text(rng);
    const auto r = analyzer.analyze(text);
    const auto tokens = tokenize(text);
    const auto mentions = find_numerals(tokens);
    REQUIRE(r.rows.size() == mentions.size());
    for (std::size_t i = 0; i < mentions.size(); ++i) {
      CHECK(r.rows[i].numeral == mentions[i].token.surface);
      CHECK(r.rows[i].char_start == mentions[i].token.char_start);
      CHECK(r.rows[i].char_end == mentions[i].token.char_end);
      const auto vec = provider->embed(context_window(tokens, mentions[i], 3));
      CHECK(r.rows[i].probability == score(analyzer.model(), vec));
      CHECK(r.rows[i].label == (r.rows[i].probability > 0.5 ? ClaimLabel::kInClaim
                                                            : ClaimLabel::kOutOfClaim));
    }
    // Deterministic apart from timing.
    CHECK(analyzer.analyze(text).rows == r.rows);
  }
}

TEST_CASE("embedding failures name the mention") {
  auto provider = std::make_shared<FailingProvider>(1);
  Analyzer analyzer(model_for(provider->id()), provider);
  try {
    analyzer.analyze(testing::kSampleSentence);
    FAIL("expected AnalysisError");
  } catch (const AnalysisError& e) {
    CHECK(e.mention_id() == 1);
    CHECK(std::string(e.what()).find("'$4.5'") != std::string::npos);
    CHECK(std::string(e.what()).find("connection refused") != std::string::npos);
  }
}

TEST_CASE("analyzer rejects mismatched providers") {
  auto provider = std::make_shared<HashedEmbedder>(16, 0);
  CHECK_THROWS_AS(Analyzer(model_for({EmbedderKind::kHashed, 16, 1, ""}), provider),
                  InvalidArgument);
  CHECK_THROWS_AS(Analyzer(model_for({EmbedderKind::kHashed, 8, 0, ""}), provider),
                  InvalidArgument);
  CHECK_THROWS_AS(Analyzer(model_for(provider->id()), nullptr), InvalidArgument);
  CHECK_THROWS_AS(Analyzer(model_for(provider->id()), provider, -1), InvalidArgument);
}

TEST_CASE("table and JSON agree") {
  auto provider = std::make_shared<HashedEmbedder>(64, 0);
  Analyzer analyzer(model_for(provider->id()), provider);
  const auto r = analyzer.analyze(testing::kSampleSentence);
  REQUIRE(r.rows.size() == 2);

  const auto j = nlohmann::json::parse(result_to_json(r));
  CHECK(j["model"] == analyzer.fingerprint());
  CHECK(j["elapsed_ms"].get<long long>() == r.elapsed_ms());
  REQUIRE(j["rows"].size() == 2);
  const auto table = render_table(r);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& row = j["rows"][i];
    CHECK(row["numeral"] == r.rows[i].numeral);
    CHECK(row["start"] == r.rows[i].char_start);
    CHECK(row["end"] == r.rows[i].char_end);
    CHECK(row["label"] == to_string(r.rows[i].label));
    CHECK(row["probability"].get<double>() == r.rows[i].probability);

    char prob[32];
    std::snprintf(prob, sizeof(prob), "%.4f", r.rows[i].probability);
    CHECK(table.find(r.rows[i].numeral) != std::string::npos);
    CHECK(table.find(prob) != std::string::npos);
  }
  CHECK(table.find("execution time: ") != std::string::npos);
}

TEST_CASE("record ids key cached lookups") {
  HashedEmbedder hashed(8, 0);
  const std::string text = "up 3% and 4%";
  const auto tokens = tokenize(text);
  const auto mentions = find_numerals(tokens);
  EmbeddingCache cache{8, {}};
  for (const auto& m : mentions) {
    cache.entries.emplace(CacheKey{"r9", m.mention_id}, hashed.embed(context_window(tokens, m, 6)));
  }
  auto cached = std::make_shared<CachedEmbedder>(cache);
  Analyzer analyzer(model_for(cached->id()), cached);
  const auto r = analyzer.analyze(text, std::string("r9"));
  REQUIRE(r.rows.size() == 2);

  auto live = std::make_shared<HashedEmbedder>(8, 0);
  const auto expected = analyze(text, model_for(live->id()), live);
  CHECK(r.rows == expected.rows);

  CHECK_THROWS_AS(analyzer.analyze(text, std::string("other")), AnalysisError);
  CHECK_THROWS_AS(analyzer.analyze(text), AnalysisError);
}
