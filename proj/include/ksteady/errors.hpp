#pragma once

#include <stdexcept>
#include <string>

namespace ksteady {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument or precondition violation.
struct ParameterError : Error {
    explicit ParameterError(const std::string& msg) : Error(msg) {}
};

/// Requested value outside the admissible domain (e.g. no root exists).
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Adaptive quadrature failed to reach the tolerance; carries the partial estimate.
struct QuadratureError : Error {
    QuadratureError(const std::string& msg, double partial)
        : Error(msg), partial_estimate(partial) {}
    double partial_estimate;
};

/// ODE integrator step size underflow (problem too stiff for the explicit scheme).
struct StiffnessError : Error {
    explicit StiffnessError(const std::string& msg) : Error(msg) {}
};

/// Linear system is singular or numerically near-singular.
struct SingularMatrixError : Error {
    explicit SingularMatrixError(const std::string& msg) : Error(msg) {}
};

/// Nonlinear iteration failed to converge; message carries diagnostics.
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

/// Shooting bracket does not contain a sign change.
struct BracketError : Error {
    explicit BracketError(const std::string& msg) : Error(msg) {}
};

/// IVP trajectory left the admissible region before reaching the boundary.
struct TrajectoryError : Error {
    TrajectoryError(const std::string& msg, double radius)
        : Error(msg), blow_up_radius(radius) {}
    double blow_up_radius;
};

/// Two internal routes to the same quantity disagree beyond tolerance.
struct InternalConsistencyError : Error {
    explicit InternalConsistencyError(const std::string& msg) : Error(msg) {}
};

} // namespace ksteady
