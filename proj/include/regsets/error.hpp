#pragma once

#include <stdexcept>
#include <string>

namespace regsets {

enum class ErrorCode {
  Ok = 0,
  EmptyNet,
  InvalidRadius,
  ScaleBelowResolution,
  CannotRescale,
  EmptyRegion,
  GapNotFound,
  InvalidLambda,
  InvalidDimension,
  TooDeep,
  BadAddress,
  SpecMismatch,
  InsufficientChildren,
  InsufficientTargets,
  OutsideDomain,
  OutsideCell,
  DegeneratePair,
  DirectionNotFound,
  SlabOverlap,
  PrecisionLoss,
  NoVacantBall,
  InvalidParams,
  InvalidSchedule,
  BudgetExceeded,
  ParseError,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool cond, ErrorCode code, const std::string& message) {
  if (!cond) fail(code, message);
}

}  // namespace regsets
