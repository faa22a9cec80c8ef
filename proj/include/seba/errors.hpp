#pragma once

#include <stdexcept>
#include <string>

namespace seba {

// Invalid user-supplied parameter (bad theta, x0 out of range, ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Evaluation requested inside the guard band around a spectral pole.
struct PoleProximityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Series truncation failed to reach the requested tolerance within max_terms.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Root finder or other iteration failed to converge.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested quantity is ill-defined because of a (near-)degenerate configuration,
// e.g. a target eigenvalue colliding with a weighted pole.
struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace seba
