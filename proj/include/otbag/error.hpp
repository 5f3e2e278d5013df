#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace otbag {

// Error carries a stable machine-readable code ("DimensionMismatch",
// "EmptyStream", ...) next to the human-readable message. The CLI prints the
// code on stderr so callers can branch on it.
class Error : public std::runtime_error {
 public:
  Error(std::string code, std::string message)
      : std::runtime_error(code + ": " + message),
        code_(std::move(code)),
        message_(std::move(message)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string code_;
  std::string message_;
};

[[noreturn]] inline void raise(std::string code, const std::string& message) {
  throw Error(std::move(code), message);
}

}  // namespace otbag
