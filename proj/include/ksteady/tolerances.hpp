#pragma once

#include "ksteady/errors.hpp"

namespace ksteady {

/// Numerical tolerances shared across quadrature, integration and solves.
struct Tolerances {
    double quad_tol = 1e-10;     ///< absolute adaptive-quadrature tolerance
    double ivp_tol = 1e-10;      ///< local error tolerance of the ODE integrator
    double newton_tol = 1e-11;   ///< nonlinear residual tolerance
    int max_newton_iters = 30;

    void validate() const {
        if (!(quad_tol > 0.0) || !(ivp_tol > 0.0) || !(newton_tol > 0.0))
            throw ParameterError("Tolerances: all tolerances must be positive");
        if (max_newton_iters < 1)
            throw ParameterError("Tolerances: max_newton_iters must be >= 1");
    }
};

} // namespace ksteady
