#pragma once

#include <stdexcept>
#include <string>

namespace crunch {

// Failure taxonomy mirrored by the CLI exit codes: bad input or a violated
// contract (exit 1) versus a numerical method that ran out of budget (exit 2).
enum class ErrorKind {
  validation,
  convergence,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string& message) {
  throw Error(ErrorKind::validation, message);
}

[[noreturn]] inline void fail_convergence(const std::string& message) {
  throw Error(ErrorKind::convergence, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(message);
}

}  // namespace crunch
