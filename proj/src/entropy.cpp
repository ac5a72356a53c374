#include "mckv/entropy.hpp"

#include <cmath>

#include "mckv/quadrature.hpp"

namespace mckv {

double phi_bump(double x) {
    if (x < 0.0) throw DomainError("phi_bump: x must be >= 0");
    if (x >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

PhiDerivs phi_derivs(double x) {
    PhiDerivs d;
    if (x < 0.0) throw DomainError("phi_derivs: x must be >= 0");
    if (x >= 1.0) return d;
    const double q = 1.0 - x * x;
    d.phi = std::exp(-1.0 / q);
    // phi' = g phi with g = -2x / q^2; higher derivatives via g', g''
    const double g = -2.0 * x / (q * q);
    const double gp = (-2.0 - 6.0 * x * x) / (q * q * q);
    const double gpp = -24.0 * x * (1.0 + x * x) / (q * q * q * q);
    d.phi_x = g * d.phi;
    d.phi_xx = (g * g + gp) * d.phi;
    d.phi_xxx = (g * g * g + 3.0 * g * gp + gpp) * d.phi;
    return d;
}

double omega_eval(double kappa, double x) {
    return 2.0 * kappa * x * std::exp(-std::sqrt(2.0 * kappa) * x);
}

double omega_x_eval(double kappa, double x) {
    const double c = std::sqrt(2.0 * kappa);
    return 2.0 * kappa * (1.0 - c * x) * std::exp(-c * x);
}

EntropyPair entropy_pair(const std::vector<double>& r, double h_grid, double lambda,
                         const EntropyKit& kit) {
    const std::size_t m = r.size();
    std::size_t i1 = static_cast<std::size_t>(1.0 / h_grid);
    if (i1 + 1 >= m) throw ConfigError("entropy_pair: grid does not cover (0,1)");

    std::vector<double> hval(i1 + 1), wI(i1 + 1), wJ(i1 + 1);
    hval[0] = -lambda / kit.kappa; // L'Hopital at the 0/0 origin
    for (std::size_t i = 1; i <= i1; ++i)
        hval[i] = r[i] / kit.omega(static_cast<double>(i) * h_grid);

    for (std::size_t i = 0; i <= i1; ++i) {
        const double x = static_cast<double>(i) * h_grid;
        const double wphi = kit.omega(x) * kit.phi(x);
        double hx;
        if (i == 0)
            hx = (-3.0 * hval[0] + 4.0 * hval[1] - hval[2]) / (2.0 * h_grid);
        else if (i == i1)
            hx = (hval[i1] - hval[i1 - 1]) / h_grid;
        else
            hx = (hval[i + 1] - hval[i - 1]) / (2.0 * h_grid);
        wI[i] = hval[i] * hval[i] * wphi;
        wJ[i] = hx * hx * wphi;
    }
    EntropyPair out;
    out.I = quad::composite_simpson_uniform(wI, h_grid);
    out.J = quad::composite_simpson_uniform(wJ, h_grid);
    return out;
}

} // namespace mckv
