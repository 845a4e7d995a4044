#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmc {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  DomainError,
  ZeroSpeed,
  CurvatureVanishes,
  DegenerateArc,
  ConvexityViolation,
  DegenerateMetric,
  OutsideSphere,
  ZeroRadius,
  SingularDenominator,
  NonMonotoneArclength,
  EmptyLevelSet,
  ReconstructionSingularity,
  NoRoot,
  AxisTouch,
  ParseError,
};

constexpr std::string_view error_name(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ZeroSpeed: return "ZeroSpeed";
    case ErrorKind::CurvatureVanishes: return "CurvatureVanishes";
    case ErrorKind::DegenerateArc: return "DegenerateArc";
    case ErrorKind::ConvexityViolation: return "ConvexityViolation";
    case ErrorKind::DegenerateMetric: return "DegenerateMetric";
    case ErrorKind::OutsideSphere: return "OutsideSphere";
    case ErrorKind::ZeroRadius: return "ZeroRadius";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::NonMonotoneArclength: return "NonMonotoneArclength";
    case ErrorKind::EmptyLevelSet: return "EmptyLevelSet";
    case ErrorKind::ReconstructionSingularity: return "ReconstructionSingularity";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::AxisTouch: return "AxisTouch";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above; the CLI
/// prints `error_name(kind())` on standard error.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cmc
