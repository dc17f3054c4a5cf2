#pragma once

#include <stdexcept>
#include <string>

namespace alm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed trees, processes, problems or configuration.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A solver or closed form was asked for a problem outside its preconditions,
/// or a loss function lacks an analytic piece the operation needs.
class PreconditionError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// The constraint set is empty (tolerance below the attainable loss).
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// The objective is unbounded below over the constraint set.
class Unbounded : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: iteration limits, bracketing failures that should not
/// happen, inconsistent results between solvers.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace alm
