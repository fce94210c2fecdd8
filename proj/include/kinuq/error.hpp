#pragma once

#include <stdexcept>
#include <string>

namespace kinuq {

enum class ErrorKind {
  InvalidState,
  DegenerateDensity,
  Shape,
  Capacity,
  NumericBreakdown,
  Stability,
  FluidVacuum,
  Config,
  OracleSize,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (and the CLI
/// manifest writer) can classify it without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Message without the kind prefix, for re-throwing with added context.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::DegenerateDensity: return "degenerate-density";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::NumericBreakdown: return "numeric-breakdown";
    case ErrorKind::Stability: return "stability";
    case ErrorKind::FluidVacuum: return "fluid-vacuum";
    case ErrorKind::Config: return "config";
    case ErrorKind::OracleSize: return "oracle-size";
  }
  return "unknown";
}

}  // namespace kinuq
