#pragma once

#include <vector>

#include "mckv/errors.hpp"

namespace mckv {

/// Exact self-similar solution of the supercooled Stefan problem:
/// a profile U(t,x)) above a square-root-in-time free boundary S(t).
/// Used as solver oracle and as comparison barrier.
struct SelfSimilar {
    double c = 0.0;     // spatial offset
    double beta = 1.0;  // similarity rate, > 0
    double alpha = 1.0; // feedback strength, > 0

    void validate() const {
        if (!(beta > 0.0)) throw DomainError("SelfSimilar: beta must be > 0");
        if (!(alpha > 0.0)) throw DomainError("SelfSimilar: alpha must be > 0");
    }
};

/// Far-field plateau of alpha*U: 2 beta e^{beta^2} integral_beta^inf e^{-z^2} dz,
/// evaluated through the substituted integrand exp(-z - z^2/(4 beta^2)) so no
/// e^{beta^2} is ever formed. Value lies in (0,1), increasing in beta.
double beta_inf(double beta);

/// Free boundary S(t) = (c + beta sqrt(2t)) / alpha.
double S_eval(const SelfSimilar& ss, double t);

/// Boundary speed S'(t).
double S_prime(const SelfSimilar& ss, double t);

/// Profile value U(t,x). For t == 0 serves the step profile
/// (beta_inf/alpha above c, 0 below). Below the boundary the formula is
/// negative; the value is clamped to 0 and *clamped set when provided.
double U_eval(const SelfSimilar& ss, double t, double x, bool* clamped = nullptr);

/// Closed-form spatial derivative U_x(t,x) for x above the boundary, t > 0.
double U_x(const SelfSimilar& ss, double t, double x);

struct ResidualReport {
    double interior_max = 0.0;     // max |U_t - (1/2) U_xx| over the probe grid
    double boundary_flux_gap = 0.0; // |S' - (1/2) U_x| at the boundary (FD)
    double total() const { return interior_max + boundary_flux_gap; }
};

/// Finite-difference consistency check of the closed form against the
/// Stefan system, probing times in [t_lo, t_hi] and offsets xs measured
/// from the boundary. Steps h (space) and dt (time) control the stencils.
/// Probes closer than 2h to the boundary are a domain error.
ResidualReport selfsim_residual(const SelfSimilar& ss, const std::vector<double>& xs,
                                double t_lo, double t_hi, int nt, double h, double dt);

} // namespace mckv
