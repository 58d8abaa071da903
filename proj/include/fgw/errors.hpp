#pragma once

#include <stdexcept>
#include <string>

namespace fgw {

enum class ErrorKind {
  InvalidDimension,
  NotAntisymmetric,
  NotPure,
  NumericalFailure,
  DegenerateGroundState,
  InvalidIndexOrder,
  ContractViolation,
  InvalidParams,
  EmptySupport,
  PairNotInSupport,
  MixedSchemeError,
  EmptyInput,
  OracleCapExceeded,
  InvalidDecomposition,
  InvalidData,
  ParseError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "InvalidDimension";
    case ErrorKind::NotAntisymmetric: return "NotAntisymmetric";
    case ErrorKind::NotPure: return "NotPure";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::DegenerateGroundState: return "DegenerateGroundState";
    case ErrorKind::InvalidIndexOrder: return "InvalidIndexOrder";
    case ErrorKind::ContractViolation: return "ContractViolation";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::EmptySupport: return "EmptySupport";
    case ErrorKind::PairNotInSupport: return "PairNotInSupport";
    case ErrorKind::MixedSchemeError: return "MixedSchemeError";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::OracleCapExceeded: return "OracleCapExceeded";
    case ErrorKind::InvalidDecomposition: return "InvalidDecomposition";
    case ErrorKind::InvalidData: return "InvalidData";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fgw
