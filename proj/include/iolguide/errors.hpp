#pragma once

#include <stdexcept>
#include <string>

namespace iolguide {

enum class ErrorKind {
  kDegenerateGeometry,   // coincident positions / zero-norm vectors
  kLosSingularity,       // |cos theta_L| at or below the guard
  kHeadingSingularity,   // |cos theta| of a vehicle at or below the guard
  kValidityViolation,    // |i_P . i_L| at or below the linearization guard
  kIntegrationFailure,   // non-finite derivative
  kConfig,
  kSchema,
};

const char* to_string(ErrorKind kind);

class SimError : public std::runtime_error {
 public:
  SimError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the linearizing laws; carries the closing-alignment value that
/// failed the guard so callers can decide on a fallback.
class ValidityError : public SimError {
 public:
  ValidityError(double margin, const std::string& what)
      : SimError(ErrorKind::kValidityViolation, what), margin_(margin) {}

  double margin() const { return margin_; }

 private:
  double margin_;
};

}  // namespace iolguide
