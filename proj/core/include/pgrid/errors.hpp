#pragma once

#include <stdexcept>
#include <string>

namespace pgrid {

/// Base class for all pgrid error conditions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unreadable case file.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Case data violates a structural invariant (disconnected graph,
/// duplicate line, missing slack, bad device parameters, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Newton iteration cap hit without meeting the residual tolerance.
class NonConvergence : public Error {
public:
    NonConvergence(int iterations, double residual)
        : Error("power flow did not converge after " + std::to_string(iterations) +
                " iterations (residual " + std::to_string(residual) + ")"),
          iterations(iterations), residual(residual) {}
    int iterations;
    double residual;
};

/// Power-flow Jacobian numerically singular.
class SingularJacobian : public Error {
public:
    SingularJacobian(int iteration, double rcond)
        : Error("singular power-flow Jacobian at iteration " + std::to_string(iteration) +
                " (rcond " + std::to_string(rcond) + ")"),
          iteration(iteration), rcond(rcond) {}
    int iteration;
    double rcond;
};

/// State left the physical domain (voltage-like quantity <= 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Gain synthesis bound forces a non-positive droop gain.
class InfeasibleGain : public Error {
public:
    using Error::Error;
};

/// Dense eigensolver failed to converge.
class EigensolverFailure : public Error {
public:
    using Error::Error;
};

/// Bisection predicate not monotone across the (widened) bracket.
class BracketError : public Error {
public:
    using Error::Error;
};

/// Adaptive integrator step shrank below the floor; typically a
/// voltage collapse driving the dynamics out of the domain.
class StepSizeUnderflow : public Error {
public:
    StepSizeUnderflow(double time)
        : Error("integration step size underflow at t = " + std::to_string(time)),
          time(time) {}
    double time;
};

/// CCT search: system already unstable at the lower clearing bound.
class NeverStable : public Error {
public:
    using Error::Error;
};

/// CCT search: no unstable clearing time found below the upper bound.
class AlwaysStable : public Error {
public:
    using Error::Error;
};

/// Experiment-suite expectations not met by the case data.
class SuiteError : public Error {
public:
    using Error::Error;
};

} // namespace pgrid
