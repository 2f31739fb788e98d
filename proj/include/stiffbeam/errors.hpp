#pragma once

#include <stdexcept>
#include <string>

namespace stiffbeam {

/// Bad geometry, bad constants, malformed configuration.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside a solver.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No sign change of the terminal residual over the shooting bracket.
struct NoBuckledSolution : SolverError {
    using SolverError::SolverError;
};

/// Integration ran past the arc-length cap without hitting the event.
struct DivergenceError : SolverError {
    using SolverError::SolverError;
};

/// Interpolation query outside the tabulated range.
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Contact / buckling detection failures on a trace.
struct DetectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingContactSource : DetectionError {
    using DetectionError::DetectionError;
};

struct NoContact : DetectionError {
    using DetectionError::DetectionError;
};

struct NoBuckling : DetectionError {
    using DetectionError::DetectionError;
};

/// delta_i came out zero; the indenter equation divides by it.
struct SingularIndentation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Simulated advance ended before the beam buckled.
struct IncompleteTrial : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file; message carries the line number.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace stiffbeam
