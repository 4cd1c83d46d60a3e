#pragma once

#include <stdexcept>
#include <string>

namespace msol {

/// Failure classes; the CLI maps them onto exit codes.
enum class ErrorKind {
  config,        // invalid configuration or schema (exit 2)
  numerical,     // quadrature or integrator breakdown (exit 3)
  precondition,  // caller violated an operation's precondition (exit 2)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail),
        kind_(kind),
        code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Stable short identifier such as "duplicate-speeds".
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string code,
                              const std::string& detail) {
  throw Error(kind, std::move(code), detail);
}

}  // namespace msol
