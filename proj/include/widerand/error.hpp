#pragma once

#include <stdexcept>
#include <string>

namespace widerand {

enum class ErrorKind {
  InvalidParameter,
  InvalidRange,
  PreconditionViolation,
  SourceExhausted,
  InvalidSeed,
  InsufficientData,
  OversizeEnumeration,
  Parse,
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::InvalidRange: return "invalid range";
    case ErrorKind::PreconditionViolation: return "precondition violation";
    case ErrorKind::SourceExhausted: return "source exhausted";
    case ErrorKind::InvalidSeed: return "invalid seed";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::OversizeEnumeration: return "oversize enumeration";
    case ErrorKind::Parse: return "parse error";
  }
  return "unknown";
}

/// Single exception type for the library; `kind()` tells callers what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace widerand
