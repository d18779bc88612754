#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpd {

enum class ErrorKind {
  NotPositiveDefinite,
  DimensionMismatch,
  DegenerateWeights,
  SingularScatter,
  InfeasibleKKT,
  TargetBelowMinimumVariance,
  BisectionRangeExhausted,
  InvalidArgument,
  ParseError,
  NonFiniteValue,
  TooFewRows,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateWeights: return "DegenerateWeights";
    case ErrorKind::SingularScatter: return "SingularScatter";
    case ErrorKind::InfeasibleKKT: return "InfeasibleKKT";
    case ErrorKind::TargetBelowMinimumVariance: return "TargetBelowMinimumVariance";
    case ErrorKind::BisectionRangeExhausted: return "BisectionRangeExhausted";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::TooFewRows: return "TooFewRows";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Input/data problems as opposed to numerical failures; the CLI maps the
/// two groups to different exit codes.
constexpr bool is_data_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch:
    case ErrorKind::InvalidArgument:
    case ErrorKind::ParseError:
    case ErrorKind::NonFiniteValue:
    case ErrorKind::TooFewRows:
    case ErrorKind::IoError:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace mpd
