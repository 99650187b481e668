#pragma once

#include <stdexcept>
#include <string>

namespace attrscope {

enum class ErrorKind {
  Validation,  // bad input or precondition violation
  NotFound,    // unknown image id, group id or file
  NotReady,    // embedding still computing or never requested
  Numerical,   // solver diverged or failed to converge
  Io,
  Internal,
};

// Every failure inside the engine surfaces as an Error. `code` is a short
// machine-readable slug (e.g. "invalid_k") echoed by the HTTP layer.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message,
        std::string detail = {})
      : std::runtime_error(message),
        kind_(kind),
        code_(std::move(code)),
        detail_(std::move(detail)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string code_;
  std::string detail_;
};

inline Error validation_error(std::string code, const std::string& message,
                              std::string detail = {}) {
  return Error(ErrorKind::Validation, std::move(code), message,
               std::move(detail));
}

inline Error not_found_error(std::string code, const std::string& message,
                             std::string detail = {}) {
  return Error(ErrorKind::NotFound, std::move(code), message,
               std::move(detail));
}

}  // namespace attrscope
