#include "support/fake_provider.hpp"

#include <httplib.h>
#include <json.hpp>

namespace fincat::testing {

FakeProvider::FakeProvider(std::function<FakeReply(const std::string&)> handler)
    : server_(std::make_unique<httplib::Server>()), requests_(std::make_shared<int>(0)) {
  auto counter = requests_;
  server_->Post("/embed", [handler, counter](const httplib::Request& req,
                                             httplib::Response& res) {
    ++*counter;
    const FakeReply reply = handler(req.body);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  port_ = server_->bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

FakeProvider::~FakeProvider() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string FakeProvider::endpoint() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

std::string constant_vector_body(int dim, double value) {
  nlohmann::json j;
  j["vector"] = std::vector<double>(static_cast<std::size_t>(dim), value);
  return j.dump();
}

int unused_port() {
  httplib::Server probe;
  const int port = probe.bind_to_any_port("127.0.0.1");
  return port;  // released when probe goes out of scope
}

}  // namespace fincat::testing
