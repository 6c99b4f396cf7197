#pragma once

#include <stdexcept>
#include <string>

namespace gazeload {

// All library failures surface as one of these. The category string is the
// first token of what() so CLI output stays machine-parseable:
//   error: <category>: <message>
class Error : public std::runtime_error {
public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(category + ": " + message),
        category_(std::move(category)) {}

  const std::string& category() const { return category_; }

private:
  std::string category_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error("parse", msg) {}
};

struct InputError : Error {
  explicit InputError(const std::string& msg) : Error("input", msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error("config", msg) {}
};

struct BackendError : Error {
  explicit BackendError(const std::string& msg, bool retryable = true)
      : Error("backend", msg), retryable_(retryable) {}

  // Auth failures are permanent; transport hiccups may be retried.
  bool retryable() const { return retryable_; }

private:
  bool retryable_;
};

}  // namespace gazeload
