#pragma once

#include <stdexcept>
#include <string>

namespace dmtk {

// Numerical breakdowns (non-convergence, unstable decompositions, ...).
// Distinct from std::invalid_argument, which callers reserve for parameter
// validation, so the CLI can map the two families to different exit codes.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pole configuration too close to coincident for a stable partial-fraction
// expansion, or weights that blew past the safety bound while splitting it.
struct DegenerateSpectrumError : NumericalError {
    using NumericalError::NumericalError;
};

// Transform evaluated on (or numerically at) a pole.
struct PoleError : NumericalError {
    using NumericalError::NumericalError;
};

// A Monte Carlo estimate with zero observed events where a log or ratio is
// required downstream.
struct InsufficientSamplesError : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace dmtk
