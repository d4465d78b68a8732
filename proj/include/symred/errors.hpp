#pragma once

#include <stdexcept>
#include <string>

namespace symred {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (wrong ambient dimension, odd dimension, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A floating-point rank or tolerance decision fell inside the ambiguity band
/// around its cutoff. The caller has to rescale or tighten the input; the
/// toolkit never guesses.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Group data is malformed: non-symplectic generator, closure too large,
/// structure constants failing antisymmetry or Jacobi.
class GroupError : public Error {
 public:
  using Error::Error;
};

/// An invariant could not be written in the Hilbert-map generators.
class ExpressibilityError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed model configuration or polynomial text.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace symred
