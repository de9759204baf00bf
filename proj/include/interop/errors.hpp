#pragma once

#include <stdexcept>
#include <string>

namespace interop {

enum class ErrorCode {
  UnknownChain,
  UnknownBridge,
  UnknownFilter,
  SchemaMismatch,
  DuplicateKey,
  SelfLoop,
  SummaryOrderViolation,
  MemberCountOutOfRange,
  SameChain,
  InvalidProbability,
  NoSummaries,
  EmptyPeriod,
  UnclassifiedChain,
  RankDeficient,
  InsufficientVariation,
  DegenerateTreatment,
  InsufficientPairs,
  JoinKeyMismatch,
  IncompleteBundle,
  BadConfig,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace interop
