#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "fincat/embedding.hpp"
#include "fincat/error.hpp"

namespace fincat {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // base path without trailing '/'
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidArgument("embedding endpoint must be an http:// URL: " + url);
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http") {
    throw InvalidArgument("unsupported embedding endpoint scheme '" + scheme + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) ep.path = url.substr(path_start);
  while (!ep.path.empty() && ep.path.back() == '/') ep.path.pop_back();
  if (ep.origin.size() <= scheme_end + 3) {
    throw InvalidArgument("embedding endpoint has no host: " + url);
  }
  return ep;
}

}  // namespace

EmbeddingVector fetch_remote_embedding(const std::string& endpoint,
                                       const ContextWindow& window, int dim,
                                       std::chrono::milliseconds timeout) {
  const Endpoint ep = split_endpoint(endpoint);

  nlohmann::json request;
  request["window_words"] = nlohmann::json::array();
  for (const auto& w : window.words) request["window_words"].push_back(w.surface);
  request["numeral_pos"] = window.numeral_pos;
  request["dim"] = dim;

  httplib::Client client(ep.origin);
  const auto secs = timeout.count() / 1000;
  const auto usecs = (timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  auto res = client.Post(ep.path + "/embed", request.dump(), "application/json");
  if (!res) {
    throw TransportError("embedding request to " + endpoint + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProviderError(res->status, res->body);
  }

  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(std::string("embedding response is not JSON: ") + e.what());
  }
  if (!body.is_object() || !body.contains("vector") || !body["vector"].is_array()) {
    throw ProtocolError("embedding response lacks a \"vector\" array");
  }
  const auto& arr = body["vector"];
  if (arr.size() != static_cast<std::size_t>(dim)) {
    throw ProtocolError("embedding response has " + std::to_string(arr.size()) +
                        " values, expected " + std::to_string(dim));
  }
  std::vector<double> values;
  values.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) throw ProtocolError("embedding response holds a non-number");
    values.push_back(v.get<double>());
    if (!std::isfinite(values.back())) {
      throw ProtocolError("embedding response holds a non-finite value");
    }
  }
  return EmbeddingVector(std::move(values));
}

RemoteEmbedder::RemoteEmbedder(std::string endpoint, int dim,
                               std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), dim_(dim), timeout_(timeout) {
  if (dim_ <= 0) throw InvalidArgument("remote embedder dim must be positive");
  if (timeout_.count() <= 0) throw InvalidArgument("remote embedder timeout must be positive");
  split_endpoint(endpoint_);
}

EmbedderId RemoteEmbedder::id() const {
  return {EmbedderKind::kRemote, dim_, 0, endpoint_};
}

EmbeddingVector RemoteEmbedder::embed(const ContextWindow& window,
                                      const std::optional<CacheKey>&) const {
  return fetch_remote_embedding(endpoint_, window, dim_, timeout_);
}

}  // namespace fincat
