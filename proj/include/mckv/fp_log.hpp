#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mckv/density.hpp"
#include "mckv/entropy.hpp"
#include "mckv/fp_grid.hpp"
#include "mckv/fp_linear.hpp" // BlowupEvent
#include "mckv/timeseries.hpp"

namespace mckv {

struct LogGridConfig : GridConfig {
    /// Blow-up trigger: cumulative integral of lambda^2 exceeding
    /// cap * (1 + t) stops the run.
    double lambda_l2_cap = 25.0;
};

struct LogSnapshot {
    double t = 0.0;
    double qbar = 0.0;
    double lambda = 0.0;
    std::vector<double> r; // normalized density, unit mass
};

/// Record of a log-model run in the normalized variables: r = q / qbar,
/// lambda = -(1/2) r_x(t,0), survival qbar integrated from lambda, plus the
/// entropy functionals I, J against the stationary weight.
struct LogSolution {
    double h = 0.0;
    double x_max = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double kappa = 0.125;
    double dt_nominal = 0.0;
    TimeSeries lambda_ts;
    TimeSeries qbar_ts;
    TimeSeries I_ts;
    TimeSeries J_ts;
    TimeSeries lambda_l2_cum;
    std::vector<LogSnapshot> snapshots;
    std::optional<BlowupEvent> blowup;
    std::optional<std::string> stop_reason;   // e.g. survival underflow
    double max_mass_drift_per_step = 0.0;     // pre-normalization, logged
};

/// Advances r_t = (1/2) r_xx - (alpha lambda + beta) r_x - lambda r with
/// lambda = -(1/2) r_x(t,0) resolved per step, per-step renormalization of r
/// to unit mass, and qbar integrated exactly from the per-step lambda.
LogSolution solve_log(const Density& q0, const ModelParams& params, double T,
                      const LogGridConfig& cfg);

/// Entropy functionals recomputed from stored snapshots with an arbitrary kit.
std::pair<TimeSeries, TimeSeries> entropy_series(const LogSolution& sol,
                                                 const EntropyKit& kit);

struct LambdaBudget {
    TimeSeries cumulative;     // integral of lambda^2 up to t
    double fit_slope = 0.0;    // least-squares slope over the fit window
    double fit_intercept = 0.0;
    double max_abs_residual = 0.0;
};

/// Cumulative lambda^2 with an affine fit over [window_frac * T_end, T_end].
LambdaBudget lambda_l2_budget(const LogSolution& sol, double window_frac = 0.1);

} // namespace mckv
