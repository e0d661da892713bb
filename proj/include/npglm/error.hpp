#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace npglm {

enum class ErrorCode {
  kValidation,
  kParse,
  kQueryBeyondWindow,
  kTargetBeyondWindow,
  kQuantileBeyondWindow,
  kInvalidRange,
  kDegenerateRiskSet,
  kNonFiniteObjective,
  kNoObservedEvents,
  kNonConvergence,
  kUndefinedAtZero,
  kSchemaMismatch,
  kInsufficientNegatives,
  kInsufficientObserved,
  kZeroTruthTime,
  kFoldTooSmall,
  kIo,
};

std::string_view ErrorName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorName(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Throws a validation error when `condition` is false.
inline void Require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::kValidation, message);
}

}  // namespace npglm
