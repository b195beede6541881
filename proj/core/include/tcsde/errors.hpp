#pragma once

#include <stdexcept>
#include <string>

namespace tcsde {

// Error taxonomy shared across the library. The CLI maps each class to a
// distinct process exit code (see commands.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument or configuration value outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Operational horizon does not cover the requested calendar range; the
// caller should extend the subordinator path rather than truncate.
class CoverageError : public Error {
 public:
  using Error::Error;
};

// A stability hypothesis fails (spectral abscissa not negative, or a
// required integrability flag of the perturbation gain is not met).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

// A requested numerical check ran to completion and failed.
class VerdictError : public Error {
 public:
  using Error::Error;
};

// Requested tolerance could not be met; carries the achieved estimate.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved_rel_error)
      : Error(what), achieved(achieved_rel_error) {}
  double achieved;
};

// Result not representable in double precision.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Trajectory divergence guard tripped during integration.
class BlowUpError : public Error {
 public:
  using Error::Error;
};

// Estimated allocation exceeds the configured memory budget; raised before
// any allocation happens.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Input outside the supported catalog (e.g. an unknown test function).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Data unusable for the requested fit (e.g. nonpositive moment estimates
// inside the fit window).
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tcsde
