#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bgpp {

enum class ErrorKind {
  NegativeParameter,
  NonFinite,
  DomainError,
  SingularPoint,
  NotEHLimit,
  TurningPointCrossed,
  ModulusOutOfRange,
  CharacteristicPole,
  NoConvergence,
  UnattainableLevel,
  ZeroCasimir,
  InconsistentInitialData,
  DegenerateRoots,
  NotDegenerate,
  BoundaryBolt,
  StepFailure,
  DomainExit,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeParameter: return "NegativeParameter";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::NotEHLimit: return "NotEHLimit";
    case ErrorKind::TurningPointCrossed: return "TurningPointCrossed";
    case ErrorKind::ModulusOutOfRange: return "ModulusOutOfRange";
    case ErrorKind::CharacteristicPole: return "CharacteristicPole";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::UnattainableLevel: return "UnattainableLevel";
    case ErrorKind::ZeroCasimir: return "ZeroCasimir";
    case ErrorKind::InconsistentInitialData: return "InconsistentInitialData";
    case ErrorKind::DegenerateRoots: return "DegenerateRoots";
    case ErrorKind::NotDegenerate: return "NotDegenerate";
    case ErrorKind::BoundaryBolt: return "BoundaryBolt";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::DomainExit: return "DomainExit";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` discriminates the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bgpp
