#pragma once

#include <stdexcept>
#include <string>

namespace quasivar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (p <= 1, k <= 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The open interval for a Young-split exponent is empty.
class InfeasibleInterval : public Error {
 public:
  using Error::Error;
};

/// The exponent configuration does not satisfy the structural hypotheses.
class NonAdmissibleConfig : public Error {
 public:
  using Error::Error;
};

/// An energy evaluation produced a non-finite intermediate.
class NonFiniteEnergy : public Error {
 public:
  using Error::Error;
};

class LinearSolveError : public Error {
 public:
  using Error::Error;
};

/// Scaling along the first eigenfunction never reached negative energy.
class NoNegativeEnergy : public Error {
 public:
  using Error::Error;
};

}  // namespace quasivar
