#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fincat {

/// Base of every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a precondition: shape mismatch, unknown mention, bad value.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or parsed. line() is 1-based, 0 when the
/// problem is not tied to a line (missing file, bad header position).
class LoadError : public Error {
 public:
  LoadError(const std::string& path, std::size_t line, const std::string& what)
      : Error(format(path, line, what)), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& path, std::size_t line,
                            const std::string& what) {
    std::string msg = path;
    if (line > 0) msg += ":" + std::to_string(line);
    return msg + ": " + what;
  }

  std::size_t line_;
};

/// Embedding backend failures.
class EmbeddingError : public Error {
 public:
  using Error::Error;
};

/// Network failure or timeout talking to a remote provider.
class TransportError : public EmbeddingError {
 public:
  using EmbeddingError::EmbeddingError;
};

/// The provider answered, but not in the agreed wire form.
class ProtocolError : public EmbeddingError {
 public:
  using EmbeddingError::EmbeddingError;
};

/// The provider answered with a non-2xx status.
class ProviderError : public EmbeddingError {
 public:
  ProviderError(int status, std::string body)
      : EmbeddingError("embedding provider returned HTTP " +
                       std::to_string(status) + ": " + body),
        status_(status),
        body_(std::move(body)) {}

  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

/// The cached backend has no vector for the requested key.
class CacheMiss : public EmbeddingError {
 public:
  using EmbeddingError::EmbeddingError;
};

}  // namespace fincat
