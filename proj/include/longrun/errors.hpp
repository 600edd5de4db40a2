#pragma once

#include <stdexcept>
#include <string>

namespace longrun {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid argument outside the mathematical domain (p >= 1, CIR state <= 0, ...).
struct DomainError : Error {
    using Error::Error;
};

// q * rho'rho == 1: the delta-transform phi = exp(v/delta) degenerates.
struct SingularDelta : Error {
    using Error::Error;
};

// A model parameter set violates one of the standing assumptions.
struct AssumptionViolation : Error {
    using Error::Error;
};

// The Riccati solver could not produce a root with right-half-plane closed-loop spectrum.
struct NoStabilizingSolution : Error {
    using Error::Error;
};

// A linear system is numerically singular (condition number beyond 1e14).
struct SingularSystem : Error {
    using Error::Error;
};

// Theta < 0 in the one-state closed form (possible only for 0 < p < 1).
struct NegativeDiscriminant : Error {
    using Error::Error;
};

// Finite-time explosion detected during an ODE integration.
struct BlowUpError : Error {
    BlowUpError(const std::string& what, double time) : Error(what), blow_up_time(time) {}
    double blow_up_time;
};

struct NoConvergence : Error {
    using Error::Error;
};

// Discretization produced an eigenvector with a sign change.
struct NonPositiveEigenvector : Error {
    using Error::Error;
};

struct QuadratureFailure : Error {
    using Error::Error;
};

// Truncation diagnostics of the Feller test disagree across doublings.
struct InconclusiveTest : Error {
    using Error::Error;
};

// Exponent conditions 2 - delta > 0, 2 - delta/(1-p) > 0 fail.
struct RegionViolation : Error {
    using Error::Error;
};

// Halving the ODE step still changes the result beyond tolerance.
struct StepTooCoarse : Error {
    using Error::Error;
};

// No sign change of the certainty-equivalent gap in the search interval.
struct NoBracket : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct SimulationError : Error {
    using Error::Error;
};

struct DegenerateSample : Error {
    using Error::Error;
};

}  // namespace longrun
