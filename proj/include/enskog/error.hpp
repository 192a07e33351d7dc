#pragma once

#include <stdexcept>
#include <string>

namespace enskog {

// Error taxonomy shared by the library and the CLI. The kind is stable
// machine-readable vocabulary; the message is for humans.
enum class ErrorKind {
  kInvalidArgument,
  kDegenerateInput,
  kSingularInput,
  kDivergentMeasure,
  kNonNormalizable,
  kCapacity,
  kMajorantViolation,
  kConfig,
  kIo,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kDegenerateInput: return "degenerate-input";
    case ErrorKind::kSingularInput: return "singular-input";
    case ErrorKind::kDivergentMeasure: return "divergent-measure";
    case ErrorKind::kNonNormalizable: return "non-normalizable";
    case ErrorKind::kCapacity: return "capacity-error";
    case ErrorKind::kMajorantViolation: return "majorant-violation";
    case ErrorKind::kConfig: return "config-error";
    case ErrorKind::kIo: return "io-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace enskog
