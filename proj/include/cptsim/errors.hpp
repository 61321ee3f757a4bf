#pragma once

#include <stdexcept>
#include <string>

namespace cpt {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent user input (parameters, config files, grids).
struct ConfigError : Error {
  using Error::Error;
};

// Steady-state linear system is rank deficient beyond the expected
// single trace direction (decoupled or pathological parameter set).
struct SingularSystem : Error {
  using Error::Error;
};

// Solver output failed the density-matrix validity checks.
struct NonPhysicalState : Error {
  using Error::Error;
};

// Fixed-step integrator left its stability region (trace drift).
struct StepTooLarge : Error {
  using Error::Error;
};

// Fit input carries no usable signal.
struct DegenerateData : Error {
  using Error::Error;
};

}  // namespace cpt
