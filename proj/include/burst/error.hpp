#pragma once

#include <stdexcept>
#include <string>

namespace burst {

enum class ErrorCode {
  Format,      // malformed file header or syntax
  Integrity,   // declared shape disagrees with payload
  Data,        // non-finite or out-of-range values
  Degenerate,  // input/output collapsed (zero row, zero aggregate, all-zero weights)
  Manifest,    // duplicate or inconsistent manifest entries
  Resolution,  // referenced file or id does not resolve
  Param,       // parameter outside its domain
  Contract,    // precondition violation (unnormalized rows, length mismatch)
  Numeric,     // factorization or solve failure
  Config,      // unresolvable configuration
  Protocol,    // evaluation protocol violation
  Internal,    // invariant corruption
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Format: return "format";
    case ErrorCode::Integrity: return "integrity";
    case ErrorCode::Data: return "data";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::Manifest: return "manifest";
    case ErrorCode::Resolution: return "resolution";
    case ErrorCode::Param: return "param";
    case ErrorCode::Contract: return "contract";
    case ErrorCode::Numeric: return "numeric";
    case ErrorCode::Config: return "config";
    case ErrorCode::Protocol: return "protocol";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace burst
