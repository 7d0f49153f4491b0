#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hamwave {

enum class ErrorKind {
  InvalidParameter,
  ZeroModeRejected,
  NoConvergence,
  CollapseToZero,
  UnderResolved,
  SpectralConfigViolation,
  ZeroField,
  DegenerateConstraints,
  BlowupDetected,
  ResolutionLoss,
  SingularEvaluation,
  ExpansionDiverging,
  NonZeroMean,
  JacobianSingular,
  SymmetryDefect,
  AdmissibilityLost,
  IoError,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::ZeroModeRejected: return "ZeroModeRejected";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::CollapseToZero: return "CollapseToZero";
    case ErrorKind::UnderResolved: return "UnderResolved";
    case ErrorKind::SpectralConfigViolation: return "SpectralConfigViolation";
    case ErrorKind::ZeroField: return "ZeroField";
    case ErrorKind::DegenerateConstraints: return "DegenerateConstraints";
    case ErrorKind::BlowupDetected: return "BlowupDetected";
    case ErrorKind::ResolutionLoss: return "ResolutionLoss";
    case ErrorKind::SingularEvaluation: return "SingularEvaluation";
    case ErrorKind::ExpansionDiverging: return "ExpansionDiverging";
    case ErrorKind::NonZeroMean: return "NonZeroMean";
    case ErrorKind::JacobianSingular: return "JacobianSingular";
    case ErrorKind::SymmetryDefect: return "SymmetryDefect";
    case ErrorKind::AdmissibilityLost: return "AdmissibilityLost";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library. `kind()` is stable and machine-readable.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hamwave
