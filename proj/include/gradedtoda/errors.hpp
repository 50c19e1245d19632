#ifndef GRADEDTODA_ERRORS_HPP
#define GRADEDTODA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gradedtoda {

enum class ErrorCode {
  // graph construction / validation
  NonContiguousWindow,
  EdgeRankViolation,
  Disconnected,
  NonPositiveMeasure,
  UnknownVertex,
  UnknownFamily,
  BadParams,
  // operator preconditions
  DimensionMismatch,
  WindowMismatch,
  MeasureBalanceViolated,
  NotWeightedSelfAdjoint,
  SeparationViolated,
  ZeroOffDiagonal,
  StructureLost,
  TooFewSamples,
  TrivialKernel,
  SingularDeterminant,
  // dynamics
  MassBelowDelta,
  InverseDomainError,
  BlowUp,
  NonFiniteField,
  // cli / io
  ParseError,
  IoError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonContiguousWindow: return "NonContiguousWindow";
    case ErrorCode::EdgeRankViolation: return "EdgeRankViolation";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::NonPositiveMeasure: return "NonPositiveMeasure";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::MeasureBalanceViolated: return "MeasureBalanceViolated";
    case ErrorCode::NotWeightedSelfAdjoint: return "NotWeightedSelfAdjoint";
    case ErrorCode::SeparationViolated: return "SeparationViolated";
    case ErrorCode::ZeroOffDiagonal: return "ZeroOffDiagonal";
    case ErrorCode::StructureLost: return "StructureLost";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::TrivialKernel: return "TrivialKernel";
    case ErrorCode::SingularDeterminant: return "SingularDeterminant";
    case ErrorCode::MassBelowDelta: return "MassBelowDelta";
    case ErrorCode::InverseDomainError: return "InverseDomainError";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::NonFiniteField: return "NonFiniteField";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown by the integrators; carries the last time at which the state was finite
// and within the blow-up bound.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double last_good_time)
      : Error(ErrorCode::BlowUp, what), last_good_time_(last_good_time) {}

  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace gradedtoda

#endif  // GRADEDTODA_ERRORS_HPP
