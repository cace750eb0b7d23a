#pragma once

#include <stdexcept>
#include <string>

namespace dfrt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bounds, ranges, malformed config files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Array lengths or grids that do not match.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Base of all numerical failures (exit code 2 in the CLI).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The shift of a shift-invert solve coincides with an eigenvalue.
class ShiftError : public SolverError {
 public:
  using SolverError::SolverError;
};

class SizeError : public SolverError {
 public:
  using SolverError::SolverError;
};

class NormalizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// No θ-stationary eigenvalue was found.
class NoResonanceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Im(E) == 0: the state does not decay, lifetime is infinite.
class BoundStateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Im(E) > 0: the eigenvalue grows in time and has no lifetime.
class NotDecayingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// √n branch cannot be continued through a zero of the density.
class BranchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace dfrt
