// HTTP front end for an Analyzer.
//
//   GET  /health   -> {"status":"ok","model":<fingerprint>}
//   POST /analyze  {"text": "..."} -> rows, elapsed_ms, model
//   OPTIONS *      CORS preflight; every response allows any origin
//
// Errors are {"error": message} with a 4xx/5xx status.
#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "fincat/pipeline.hpp"

namespace httplib {
class Server;
}

namespace fincat {

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

/// Request handlers without the socket layer.
HttpReply handle_health(const Analyzer& analyzer);
HttpReply handle_analyze(const Analyzer& analyzer, std::string_view request_body);

class Service {
 public:
  explicit Service(std::shared_ptr<const Analyzer> analyzer);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds without serving. Port 0 picks a free port. Returns the bound
  /// port; throws Error when the address cannot be bound.
  int bind(const std::string& host, int port);

  /// Serves on the bound socket until stop(). Blocks.
  void run();

  /// Safe from any thread.
  void stop();

  bool is_running() const;
  void wait_until_ready() const;

 private:
  std::shared_ptr<const Analyzer> analyzer_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace fincat
