#pragma once

#include <stdexcept>
#include <string>

namespace hardymu {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A stated precondition of an operation was violated by the caller.
struct PreconditionError : Error {
  using Error::Error;
};

// An integral is divergent, or refinement failed to converge on it.
struct DivergenceError : Error {
  using Error::Error;
};

// A test function fails the numerical certificate for the weighted
// Sobolev class the functional is defined on.
struct MembershipError : Error {
  using Error::Error;
};

// A time step could not be completed at the current step size.
struct StepRejected : Error {
  using Error::Error;
};

// Non-finite values appeared during time stepping; feeds blow-up detection.
struct OverflowError : Error {
  using Error::Error;
};

}  // namespace hardymu
