#pragma once

#include <stdexcept>
#include <string>

namespace zeitlin {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: wrong dimensions, violated matrix invariants, malformed
// files or configs.  CLI exit code 1.
struct InputError : Error {
  using Error::Error;
};

// An algebraic solver (Newton, alignment, diagonalization) failed to
// converge or hit a singular system.  CLI exit code 2.
struct SolverError : Error {
  using Error::Error;
};

// The time integrator's inner iteration failed.  CLI exit code 3.
struct IntegratorError : Error {
  using Error::Error;
  IntegratorError(const std::string& what, int step_index)
      : Error(what), step(step_index) {}
  int step = -1;  // trajectory step index at the failure, -1 when standalone
};

}  // namespace zeitlin
