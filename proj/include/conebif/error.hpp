#pragma once

#include <stdexcept>
#include <string>

namespace conebif {

/// Bad input: a precondition, window inequality or config field was violated.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to deliver its contract (non-convergence,
/// singular system, residual check).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularJacobianError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace conebif
