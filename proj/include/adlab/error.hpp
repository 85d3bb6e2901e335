#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adlab {

enum class ErrorCode {
  DuplicateKey,
  SlotRange,
  MissingParam,
  BadParam,
  NotFound,
  TokenRejected,
  OriginMismatch,
  PatternNotFound,
  FetchError,
  ConfigError,
  BaselineUnavailable,
  InsufficientTraining,
  TruthMismatch,
  IoError,
};

inline std::string_view error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::SlotRange: return "SlotRange";
    case ErrorCode::MissingParam: return "MissingParam";
    case ErrorCode::BadParam: return "BadParam";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::TokenRejected: return "TokenRejected";
    case ErrorCode::OriginMismatch: return "OriginMismatch";
    case ErrorCode::PatternNotFound: return "PatternNotFound";
    case ErrorCode::FetchError: return "FetchError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::BaselineUnavailable: return "BaselineUnavailable";
    case ErrorCode::InsufficientTraining: return "InsufficientTraining";
    case ErrorCode::TruthMismatch: return "TruthMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Domain error carrying a stable code; message is advisory only.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace adlab
