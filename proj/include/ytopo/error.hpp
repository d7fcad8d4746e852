#pragma once

#include <stdexcept>
#include <string>

namespace ytopo {

enum class ErrorCode {
  InvalidParameter,
  SingularLoad,
  Resonance,
  IdealLine,
  MatchedLoad,
  InconsistentMeasurement,
  DegeneratePair,
  AmbiguousPair,
  InvalidTopology,
  ConfigError,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "invalid parameter";
    case ErrorCode::SingularLoad: return "singular load";
    case ErrorCode::Resonance: return "resonance";
    case ErrorCode::IdealLine: return "ideal line";
    case ErrorCode::MatchedLoad: return "matched load";
    case ErrorCode::InconsistentMeasurement: return "inconsistent measurement";
    case ErrorCode::DegeneratePair: return "degenerate pair";
    case ErrorCode::AmbiguousPair: return "ambiguous pair";
    case ErrorCode::InvalidTopology: return "invalid topology";
    case ErrorCode::ConfigError: return "config error";
    case ErrorCode::IoError: return "io error";
  }
  return "error";
}

}  // namespace ytopo
