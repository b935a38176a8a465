#pragma once

#include <stdexcept>
#include <string>

namespace lhv {

enum class ErrorCode {
  MissingEntry,
  NegativeProbability,
  UnknownLabel,
  ZeroSupport,
  InvalidModel,
  InvalidBehavior,
  BadCardinality,
  NonUnitDirection,
  NotPerfectlyCorrelated,
  NotDeterministicPremise,
  IncompatibleRelabel,
  TooLarge,
  ShapeMismatch,
  BadOutcomeAlphabet,
  NegativeTime,
  GridTouchesBreakpoint,
  HorizonTooShort,
  ParseError,
  UnknownScenario,
  UnknownProperty,
  BadParams,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingEntry: return "MissingEntry";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::ZeroSupport: return "ZeroSupport";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InvalidBehavior: return "InvalidBehavior";
    case ErrorCode::BadCardinality: return "BadCardinality";
    case ErrorCode::NonUnitDirection: return "NonUnitDirection";
    case ErrorCode::NotPerfectlyCorrelated: return "NotPerfectlyCorrelated";
    case ErrorCode::NotDeterministicPremise: return "NotDeterministicPremise";
    case ErrorCode::IncompatibleRelabel: return "IncompatibleRelabel";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BadOutcomeAlphabet: return "BadOutcomeAlphabet";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::GridTouchesBreakpoint: return "GridTouchesBreakpoint";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::UnknownProperty: return "UnknownProperty";
    case ErrorCode::BadParams: return "BadParams";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace lhv
