#pragma once

#include <stdexcept>
#include <string>

namespace torsio {

enum class ErrorKind {
  InvalidArgument,
  NotConvex,
  Degenerate,
  NumericalCollapse,
  OracleMismatch,
  NotStadium,
  NoParallelSides,
  NotCircumscribed,
  GapTooWide,
  NonConvergent,
  MeshFailure,
  SingularSystem,
  NoConvergence,
  BadSchedule,
  ParseError,
  RangeError,
  IoError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotConvex: return "NotConvex";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NumericalCollapse: return "NumericalCollapse";
    case ErrorKind::OracleMismatch: return "OracleMismatch";
    case ErrorKind::NotStadium: return "NotStadium";
    case ErrorKind::NoParallelSides: return "NoParallelSides";
    case ErrorKind::NotCircumscribed: return "NotCircumscribed";
    case ErrorKind::GapTooWide: return "GapTooWide";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::MeshFailure: return "MeshFailure";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::BadSchedule: return "BadSchedule";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Failures caused by the numerics rather than by the input.
  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::NonConvergent || kind_ == ErrorKind::NoConvergence ||
           kind_ == ErrorKind::NumericalCollapse || kind_ == ErrorKind::SingularSystem ||
           kind_ == ErrorKind::MeshFailure || kind_ == ErrorKind::OracleMismatch;
  }

 private:
  ErrorKind kind_;
};

/// Error carrying a character offset into the parsed text.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : Error(ErrorKind::ParseError, what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace torsio
