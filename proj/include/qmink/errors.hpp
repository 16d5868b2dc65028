#pragma once

#include <stdexcept>

namespace qmink {

/// Base class for all qmink errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter set composes to a matrix with an eigenvalue below -tolerance.
class NonPositiveError : public Error {
 public:
  using Error::Error;
};

/// A matrix does not satisfy the density-matrix invariants an operation needs.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// Fano parameters fall outside the z-aligned block pattern.
class NotD7ClassError : public Error {
 public:
  using Error::Error;
};

class NotHermitianError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the declared domain of an operation or model.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The pseudo-time coordinate is stationary at the requested point, so the
/// velocity against it is unbounded/undefined.
class DegenerateClockError : public Error {
 public:
  using Error::Error;
};

class MalformedTableError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text (JSON state files, CLI values).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmink
