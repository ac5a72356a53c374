#include "mckv/selfsim.hpp"

#include <cmath>

#include "mckv/quadrature.hpp"

namespace mckv {

namespace {

// integral_0^y exp(-v - v^2/(4 beta^2)) dv. The integrand is bounded by
// e^{-v} and by the Gaussian factor, whichever decays first: cutting at
// min(45, 13.6 beta) leaves a tail below e^{-45}. The cutoff also keeps the
// panel comparable to the feature width for small beta, where an interval
// much wider than the support would fool the adaptive error estimate.
double profile_integral(double beta, double y) {
    if (y <= 0.0) return 0.0;
    const double inv4b2 = 1.0 / (4.0 * beta * beta);
    const double cut = std::min({y, 45.0, 13.6 * beta});
    if (cut <= 0.0) return 0.0;
    return quad::adaptive_gk15(
        [inv4b2](double v) { return std::exp(-v - v * v * inv4b2); }, 0.0, cut, 1e-12);
}

} // namespace

double beta_inf(double beta) {
    if (!(beta > 0.0)) throw DomainError("beta_inf: beta must be > 0");
    return profile_integral(beta, 45.0);
}

double S_eval(const SelfSimilar& ss, double t) {
    if (t < 0.0) throw DomainError("S_eval: t must be >= 0");
    return (ss.c + ss.beta * std::sqrt(2.0 * t)) / ss.alpha;
}

double S_prime(const SelfSimilar& ss, double t) {
    if (!(t > 0.0)) throw DomainError("S_prime: t must be > 0");
    return ss.beta / (ss.alpha * std::sqrt(2.0 * t));
}

double U_eval(const SelfSimilar& ss, double t, double x, bool* clamped) {
    ss.validate();
    if (clamped) *clamped = false;
    if (t < 0.0) throw DomainError("U_eval: t must be >= 0");
    if (t == 0.0) {
        // step profile: the t -> 0 limit of the similarity solution
        return x > ss.c ? beta_inf(ss.beta) / ss.alpha : 0.0;
    }
    const double w = (x - ss.c) / std::sqrt(2.0 * t);
    const double y = 2.0 * ss.beta * (w - ss.beta);
    if (y < 0.0) {
        if (clamped) *clamped = true;
        return 0.0;
    }
    return profile_integral(ss.beta, y) / ss.alpha;
}

double U_x(const SelfSimilar& ss, double t, double x) {
    if (!(t > 0.0)) throw DomainError("U_x: t must be > 0");
    const double w = (x - ss.c) / std::sqrt(2.0 * t);
    // 2 beta/alpha * e^{beta^2 - w^2} / sqrt(2t), written overflow-free
    const double expo = (ss.beta - w) * (ss.beta + w);
    return 2.0 * ss.beta / ss.alpha * std::exp(expo) / std::sqrt(2.0 * t);
}

ResidualReport selfsim_residual(const SelfSimilar& ss, const std::vector<double>& xs,
                                double t_lo, double t_hi, int nt, double h, double dt) {
    ss.validate();
    if (!(t_lo > 0.0) || !(t_hi > t_lo) || nt < 1)
        throw DomainError("selfsim_residual: bad time window");
    ResidualReport rep;
    for (int j = 0; j <= nt; ++j) {
        const double t = t_lo + (t_hi - t_lo) * j / std::max(1, nt);
        const double xb = ss.alpha * S_eval(ss, t);
        for (double off : xs) {
            if (off < 2.0 * h)
                throw DomainError("selfsim_residual: probe grid touches the boundary");
            const double x = xb + off;
            const double ut = (U_eval(ss, t + dt, x) - U_eval(ss, t - dt, x)) / (2.0 * dt);
            const double uxx = (U_eval(ss, t, x + h) - 2.0 * U_eval(ss, t, x) +
                                U_eval(ss, t, x - h)) / (h * h);
            rep.interior_max = std::max(rep.interior_max, std::abs(ut - 0.5 * uxx));
        }
        // one-sided second-order flux at the boundary, U(t, xb) = 0
        const double u1 = U_eval(ss, t, xb + h);
        const double u2 = U_eval(ss, t, xb + 2.0 * h);
        const double ux_fd = (4.0 * u1 - u2) / (2.0 * h);
        rep.boundary_flux_gap =
            std::max(rep.boundary_flux_gap, std::abs(S_prime(ss, t) - 0.5 * ux_fd));
    }
    return rep;
}

} // namespace mckv
