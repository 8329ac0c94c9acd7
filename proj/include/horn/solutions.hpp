#pragma once

// Numerically constructed solution jets of the Lagrangian field equations.

#include <array>
#include <string>

#include "horn/fields.hpp"
#include "horn/lagrangian.hpp"

namespace horn {

/// Spatially flat FLRW jet at t = 0: a(t) = 1 + a1 t + a2 t^2 / 2, phi(t) = phi0 + phi1 t + phi2 t^2 / 2.
/// The Hubble rate a1 and the accelerations a2, phi2 are fixed by the tt, xx and scalar equations.
struct FlrwSolution {
    FieldConfiguration config;
    double hubble = 0.0;             // a1
    double acceleration = 0.0;       // a2
    double scalar_acceleration = 0.0;  // phi2
    double residual = 0.0;           // max |E| over the three equations at the solution
    int iterations = 0;
};

/// Newton iteration on the three equations, starting from the given Hubble guess.
/// Throws std::runtime_error when the iteration does not converge.
FlrwSolution solve_flrw(const LagrangianSpec& spec, double phi0, double phi1, double hubble_guess = 0.5);

FieldConfiguration flrw_polynomial(double a1, double a2, double phi0, double phi1, double phi2);

}  // namespace horn
