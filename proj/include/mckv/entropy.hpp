#pragma once

#include <vector>

#include "mckv/errors.hpp"

namespace mckv {

/// Compactly supported bump: exp(-1/(1-x^2)) on [0,1), 0 beyond.
double phi_bump(double x);

struct PhiDerivs {
    double phi = 0.0;
    double phi_x = 0.0;
    double phi_xx = 0.0;
    double phi_xxx = 0.0;
};

/// Closed-form derivatives of the bump (all vanish identically for x >= 1).
PhiDerivs phi_derivs(double x);

/// Stationary weight omega(x) = 2 kappa x exp(-sqrt(2 kappa) x). Solves
/// (1/2) omega_xx + sqrt(2 kappa) omega_x + kappa omega = 0 with
/// omega_x(0) = 2 kappa and unit mass.
double omega_eval(double kappa, double x);
double omega_x_eval(double kappa, double x);

/// Weights for the relative-entropy diagnostics of the log model.
struct EntropyKit {
    double kappa = 0.125;

    explicit EntropyKit(double k = 0.125) : kappa(k) {
        if (!(kappa > 0.0) || kappa > 0.125)
            throw DomainError("EntropyKit: kappa must lie in (0, 1/8]");
    }
    double omega(double x) const { return omega_eval(kappa, x); }
    double phi(double x) const { return phi_bump(x); }
};

struct EntropyPair {
    double I = 0.0; // integral of h^2 omega phi over (0,1)
    double J = 0.0; // integral of h_x^2 omega phi over (0,1)
};

/// h = r/omega on the uniform grid (spacing h_grid); the origin value is the
/// L'Hopital limit r_x(0)/omega'(0) = -lambda/kappa.
EntropyPair entropy_pair(const std::vector<double>& r, double h_grid, double lambda,
                         const EntropyKit& kit);

} // namespace mckv
