#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace madv {

enum class ErrorKind {
  SelfPair,
  RepeatedQuery,
  DegenerateOptimum,
  RangeError,
  BadDelta,
  BadSetSize,
  PhaseError,
  Precondition,
  EmptySafeSet,
  BoundViolation,
  ReplayMismatch,
  BudgetExceeded,
  NotDeterministic,
  Disconnected,
  ParseError,
  InvalidArgument,
  InternalInvariant,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SelfPair: return "SelfPair";
    case ErrorKind::RepeatedQuery: return "RepeatedQuery";
    case ErrorKind::DegenerateOptimum: return "DegenerateOptimum";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::BadDelta: return "BadDelta";
    case ErrorKind::BadSetSize: return "BadSetSize";
    case ErrorKind::PhaseError: return "PhaseError";
    case ErrorKind::Precondition: return "Precondition";
    case ErrorKind::EmptySafeSet: return "EmptySafeSet";
    case ErrorKind::BoundViolation: return "BoundViolation";
    case ErrorKind::ReplayMismatch: return "ReplayMismatch";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NotDeterministic: return "NotDeterministic";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InternalInvariant: return "InternalInvariant";
  }
  return "Unknown";
}

/// Every failure raised by the library. `kind()` is the stable,
/// machine-readable part; `what()` is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace madv
