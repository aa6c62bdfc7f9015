#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fincat/service.hpp"
#include "support/fake_provider.hpp"
#include "support/synthetic.hpp"

using namespace fincat;
using nlohmann::json;

namespace {

std::shared_ptr<const Analyzer> make_analyzer() {
  auto provider = std::make_shared<HashedEmbedder>(32, 0);
  LogisticModel m;
  m.weights.assign(32, 0.0);
  for (std::size_t i = 0; i < 32; i += 2) m.weights[i] = 1.5;
  m.bias = -0.1;
  m.embedder = provider->id();
  return std::make_shared<Analyzer>(m, provider);
}

std::string error_of(const HttpReply& r) { return json::parse(r.body).at("error"); }

// Runs a Service on an ephemeral port for the lifetime of the object.
struct LiveService {
  explicit LiveService(std::shared_ptr<const Analyzer> a) : service(std::move(a)) {
    port = service.bind("127.0.0.1", 0);
    thread = std::thread([this] { service.run(); });
    service.wait_until_ready();
  }
  ~LiveService() {
    service.stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(5, 0);
    return c;
  }

  Service service;
  int port = 0;
  std::thread thread;
};

}  // namespace

TEST_CASE("health reports the model fingerprint") {
  const auto analyzer = make_analyzer();
  const auto r = handle_health(*analyzer);
  CHECK(r.status == 200);
  const auto j = json::parse(r.body);
  CHECK(j["status"] == "ok");
  CHECK(j["model"] == analyzer->fingerprint());
}

TEST_CASE("analyze handler matches the pipeline") {
  const auto analyzer = make_analyzer();
  const auto r = handle_analyze(*analyzer, json{{"text", testing::kSampleSentence}}.dump());
  REQUIRE(r.status == 200);
  const auto j = json::parse(r.body);
  const auto direct = json::parse(result_to_json(analyzer->analyze(testing::kSampleSentence)));
  CHECK(j["rows"] == direct["rows"]);
  CHECK(j["model"] == direct["model"]);
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][0]["numeral"] == "12%");
  CHECK(j["rows"][1]["numeral"] == "$4.5");

  SUBCASE("null target_span is the same as absent") {
    const auto r2 = handle_analyze(
        *analyzer, json{{"text", testing::kSampleSentence}, {"target_span", nullptr}}.dump());
    CHECK(r2.status == 200);
    CHECK(json::parse(r2.body)["rows"] == j["rows"]);
  }
}

TEST_CASE("analyze handler rejects bad requests") {
  const auto analyzer = make_analyzer();
  CHECK(handle_analyze(*analyzer, "").status == 400);
  CHECK(handle_analyze(*analyzer, "{\"text\":").status == 400);
  CHECK(handle_analyze(*analyzer, "[\"x\"]").status == 400);
  CHECK(handle_analyze(*analyzer, "{}").status == 400);
  CHECK(handle_analyze(*analyzer, "{\"text\":5}").status == 400);
  const auto r = handle_analyze(*analyzer, R"({"text":"up 5%","target_span":[3,5]})");
  CHECK(r.status == 501);
  CHECK(error_of(r).find("target_span") != std::string::npos);
  CHECK(error_of(handle_analyze(*analyzer, "")).find("empty") != std::string::npos);
}

TEST_CASE("provider failures map to 502") {
  testing::FakeProvider fake([](const std::string&) { return testing::FakeReply{503, "busy"}; });
  auto provider = std::make_shared<RemoteEmbedder>(fake.endpoint(), 8, std::chrono::milliseconds(2000));
  LogisticModel m;
  m.weights.assign(8, 0.1);
  m.embedder = provider->id();
  Analyzer analyzer(m, provider);
  const auto r = handle_analyze(analyzer, R"({"text":"no numerals here"})");
  CHECK(r.status == 200);
  const auto bad = handle_analyze(analyzer, R"({"text":"up 5%"})");
  CHECK(bad.status == 502);
  CHECK(error_of(bad).find("5%") != std::string::npos);
}

TEST_CASE("live service over HTTP") {
  const auto analyzer = make_analyzer();
  LiveService live(analyzer);
  CHECK(live.service.is_running());
  auto client = live.client();

  auto health = client.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(json::parse(health->body)["model"] == analyzer->fingerprint());

  auto ok = client.Post("/analyze", json{{"text", testing::kSampleSentence}}.dump(),
                        "application/json");
  REQUIRE(ok);
  CHECK(ok->status == 200);
  CHECK(ok->get_header_value("Content-Type") == "application/json");
  CHECK(json::parse(ok->body)["rows"] ==
        json::parse(result_to_json(analyzer->analyze(testing::kSampleSentence)))["rows"]);

  auto empty = client.Post("/analyze", "", "application/json");
  REQUIRE(empty);
  CHECK(empty->status == 400);

  auto malformed = client.Post("/analyze", "{oops", "application/json");
  REQUIRE(malformed);
  CHECK(malformed->status == 400);
  CHECK(json::parse(malformed->body).contains("error"));

  auto span = client.Post("/analyze", R"({"text":"a 1","target_span":[2,3]})", "application/json");
  REQUIRE(span);
  CHECK(span->status == 501);

  auto missing = client.Get("/nope");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body)["error"] == "not found");

  SUBCASE("cross-origin requests are allowed") {
    auto pre = client.Options("/analyze", {{"Origin", "http://ui.example"},
                                           {"Access-Control-Request-Method", "POST"}});
    REQUIRE(pre);
    CHECK(pre->status == 204);
    CHECK(pre->get_header_value("Access-Control-Allow-Origin") == "*");
    CHECK(pre->get_header_value("Access-Control-Allow-Headers") == "Content-Type");
    CHECK(ok->get_header_value("Access-Control-Allow-Origin") == "*");
    CHECK(missing->get_header_value("Access-Control-Allow-Origin") == "*");
  }
  SUBCASE("concurrent clients") {
    std::vector<std::thread> threads;
    std::atomic<int> good{0};
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&] {
        auto c = live.client();
        for (int i = 0; i < 10; ++i) {
          auto res = c.Post("/analyze", R"({"text":"revenue will be 9%"})", "application/json");
          if (res && res->status == 200) ++good;
        }
      });
    }
    for (auto& t : threads) t.join();
    CHECK(good == 40);
  }
}

TEST_CASE("bind failures throw") {
  Service service(make_analyzer());
  CHECK_THROWS_AS(service.bind("192.0.2.1", 0), Error);
  CHECK_THROWS_AS(Service(nullptr), InvalidArgument);
}
