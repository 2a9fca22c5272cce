#pragma once

#include <stdexcept>
#include <string>

namespace fracflow {

// Base class for every error this library throws on purpose.  Catching
// fracflow::Error separates "the math said no" from genuine logic bugs
// (which surface as std::logic_error / assert instead).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- special functions ---------------------------------------------------

// Gamma evaluated at 0, -1, -2, ... where it has a pole.
struct PoleAtNonpositiveInteger : Error {
    using Error::Error;
};

// A series or tail expansion failed to reach the requested tolerance
// within the term budget.
struct NoConvergence : Error {
    using Error::Error;
};

// --- Mellin-Barnes machinery ---------------------------------------------

// Two poles of the integrand coincide (or nearly coincide) in a
// configuration the evaluator does not support.
struct PoleHit : Error {
    using Error::Error;
};

// The requested expansion is only valid in a region of the z-plane that
// does not contain the argument.
struct OutOfConvergenceRegion : Error {
    using Error::Error;
};

// The divergent tail expansion cannot deliver the requested accuracy at
// this argument even at its optimal truncation point.
struct AsymptoticUnreliable : Error {
    using Error::Error;
};

// --- kernels -------------------------------------------------------------

// The quantity genuinely diverges as r -> 0 for these parameters.
struct SingularAtOrigin : Error {
    using Error::Error;
};

// --- spectral solver -----------------------------------------------------

// The periodic box or mode count cannot resolve the requested output.
struct GridTooCoarse : Error {
    using Error::Error;
};

// An internal quadrature disagrees with its coarsened version by more
// than the acceptance threshold.
struct QuadratureUnderResolved : Error {
    using Error::Error;
};

// --- real-space solver ---------------------------------------------------

// A user-supplied jump kernel violates its declared bounds.
struct KernelBoundViolation : Error {
    using Error::Error;
};

// The symmetric positive definite solve broke down (matrix not SPD or
// conditioning too poor).
struct LinearSolveFailure : Error {
    using Error::Error;
};

// Scalar root finding failed to bracket or to converge.
struct RootFindFailure : Error {
    using Error::Error;
};

// --- decay analysis ------------------------------------------------------

// A fit window with fewer than two distinct abscissae, or otherwise
// unusable data.
struct DegenerateWindow : Error {
    using Error::Error;
};

} // namespace fracflow
