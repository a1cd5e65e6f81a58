#pragma once

#include <stdexcept>
#include <string>

namespace nbl {

/// Input that violates an operation's precondition (bad index, point outside a box, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A structure could not be built (disconnected graph after all retries, singular system).
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration failed to parse or validate. `kind()` is one of
/// "parse", "missing", "unknown_key", "validation".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

}  // namespace nbl
