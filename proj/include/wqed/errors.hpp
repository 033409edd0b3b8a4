// errors.hpp — Exception types thrown by the wqed library

#pragma once

#include <stdexcept>
#include <string>

namespace wqed {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter / configuration validation failed before any compute.
struct InvalidParams : Error {
    using Error::Error;
};

// Schrieffer-Wolff denominator U^2 - (eps_{j+1} - eps_j)^2 vanished.
struct ResonantDenominator : Error {
    using Error::Error;
};

// Eigensolver did not converge.
struct ConvergenceFailure : Error {
    using Error::Error;
};

// Right-eigenvector matrix is ill-conditioned (exceptional-point proximity).
struct NearDefective : Error {
    using Error::Error;
};

// Resolvent queried within 1e-12 of a real eigenvalue.
struct PoleProximity : Error {
    using Error::Error;
};

// Residue extraction requested at a degenerate eigenvalue.
struct DegenerateEigenvalue : Error {
    using Error::Error;
};

// Adaptive quadrature failed to reach the requested tolerance.
struct IntegrationFailure : Error {
    using Error::Error;
};

// Time-domain correlation has not decayed below threshold at tmax.
struct InsufficientDecay : Error {
    using Error::Error;
};

// Run configuration rejected by schema validation.
struct ConfigError : Error {
    using Error::Error;
};

// Computed probability exceeded 1 beyond numerical tolerance.
struct ProbabilityOverflow : Error {
    using Error::Error;
};

} // namespace wqed
