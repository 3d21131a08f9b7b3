#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zgkn {

enum class ErrorKind {
  InvalidParameter,
  Admissibility,
  SingularPoint,
  DegenerateEquilibria,
  Range,
  Integration,
  NoSignChange,
  DegenerateTop,
  NotAConnector,
  NonConvergence,
  Verification,
  Quadrature,
  GridMismatch,
  Usage,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::Admissibility: return "Admissibility";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::DegenerateEquilibria: return "DegenerateEquilibria";
    case ErrorKind::Range: return "RangeError";
    case ErrorKind::Integration: return "IntegrationError";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::DegenerateTop: return "DegenerateTop";
    case ErrorKind::NotAConnector: return "NotAConnector";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::Verification: return "VerificationFailure";
    case ErrorKind::Quadrature: return "DivergentQuadrature";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::Usage: return "UsageError";
  }
  return "Unknown";
}

/// Base of every error raised by the solver. The kind is stable and
/// surfaces in the CLI's machine-readable error records.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define ZGKN_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

ZGKN_DEFINE_ERROR(InvalidParameterError, InvalidParameter)
ZGKN_DEFINE_ERROR(AdmissibilityError, Admissibility)
ZGKN_DEFINE_ERROR(SingularPointError, SingularPoint)
ZGKN_DEFINE_ERROR(DegenerateEquilibriaError, DegenerateEquilibria)
ZGKN_DEFINE_ERROR(RangeError, Range)
ZGKN_DEFINE_ERROR(IntegrationError, Integration)
ZGKN_DEFINE_ERROR(NoSignChangeError, NoSignChange)
ZGKN_DEFINE_ERROR(DegenerateTopError, DegenerateTop)
ZGKN_DEFINE_ERROR(NotAConnectorError, NotAConnector)
ZGKN_DEFINE_ERROR(NonConvergenceError, NonConvergence)
ZGKN_DEFINE_ERROR(VerificationError, Verification)
ZGKN_DEFINE_ERROR(QuadratureError, Quadrature)
ZGKN_DEFINE_ERROR(GridMismatchError, GridMismatch)
ZGKN_DEFINE_ERROR(UsageError, Usage)

#undef ZGKN_DEFINE_ERROR

}  // namespace zgkn
