#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zerolab {

enum class ErrorCode {
  InvalidDimension,
  ResolutionTooSmall,
  DimensionMismatch,
  ZeroPolynomial,
  SharedFactor,
  NewtonDivergence,
  QuadratureDivergence,
  NonPositive,
  IllConditionedGram,
  EmptySpace,
  BaseLocusPoint,
  NonPositiveDensity,
  IncompleteZeroSet,
  UnsupportedSingularWedge,
  MassMismatch,
  ParseError,
  ValidationError,
  CacheError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure the library reports. The code is stable
/// and is what callers (and the CLI's structured error JSON) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::ResolutionTooSmall: return "ResolutionTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::SharedFactor: return "SharedFactor";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::QuadratureDivergence: return "QuadratureDivergence";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::IllConditionedGram: return "IllConditionedGram";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::BaseLocusPoint: return "BaseLocusPoint";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::IncompleteZeroSet: return "IncompleteZeroSet";
    case ErrorCode::UnsupportedSingularWedge: return "UnsupportedSingularWedge";
    case ErrorCode::MassMismatch: return "MassMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::CacheError: return "CacheError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// A validation failure carrying every violation, not just the first.
class ValidationErrors : public Error {
 public:
  explicit ValidationErrors(std::vector<std::string> issues)
      : Error(ErrorCode::ValidationError, join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& s : issues) out += (out.empty() ? "" : "; ") + s;
    return out;
  }
  std::vector<std::string> issues_;
};

}  // namespace zerolab
