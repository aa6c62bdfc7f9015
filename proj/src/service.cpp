#include "fincat/service.hpp"

#include <httplib.h>
#include <json.hpp>

namespace fincat {
namespace {

HttpReply error_reply(int status, const std::string& message) {
  nlohmann::json j;
  j["error"] = message;
  return {status, j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace)};
}

}  // namespace

HttpReply handle_health(const Analyzer& analyzer) {
  nlohmann::json j;
  j["status"] = "ok";
  j["model"] = analyzer.fingerprint();
  return {200, j.dump()};
}

HttpReply handle_analyze(const Analyzer& analyzer, std::string_view request_body) {
  if (request_body.empty()) return error_reply(400, "request body is empty");
  nlohmann::json req;
  try {
    req = nlohmann::json::parse(request_body);
  } catch (const nlohmann::json::parse_error& e) {
    return error_reply(400, std::string("request body is not valid JSON: ") + e.what());
  }
  if (!req.is_object()) return error_reply(400, "request body must be a JSON object");
  if (!req.contains("text") || !req["text"].is_string()) {
    return error_reply(400, "\"text\" must be a string");
  }
  // Reserved for choosing a single target numeral; not implemented.
  if (req.contains("target_span") && !req["target_span"].is_null()) {
    return error_reply(501, "\"target_span\" is not supported yet");
  }

  try {
    return {200, result_to_json(analyzer.analyze(req["text"].get<std::string>()))};
  } catch (const AnalysisError& e) {
    return error_reply(502, e.what());
  } catch (const std::exception& e) {
    return error_reply(500, e.what());
  }
}

Service::Service(std::shared_ptr<const Analyzer> analyzer)
    : analyzer_(std::move(analyzer)), server_(std::make_unique<httplib::Server>()) {
  if (!analyzer_) throw InvalidArgument("service needs an analyzer");

  auto send = [](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  };
  server_->Get("/health", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, handle_health(*analyzer_));
  });
  server_->Post("/analyze", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_analyze(*analyzer_, req.body));
  });
  // The web UI may be hosted on another origin.
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server_->Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Max-Age", "86400");
  });
  server_->set_error_handler([send](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    send(res, error_reply(res.status, res.status == 404 ? "not found" : "request failed"));
  });
  server_->set_exception_handler(
      [send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          what = e.what();
        } catch (...) {
        }
        send(res, error_reply(500, what));
      });
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (server_->bind_to_port(host, port)) {
    bound = port;
  }
  if (bound <= 0) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void Service::run() { server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

bool Service::is_running() const { return server_->is_running(); }

void Service::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace fincat
