#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mckv/density.hpp"
#include "mckv/fp_grid.hpp"
#include "mckv/selfsim.hpp"
#include "mckv/timeseries.hpp"

namespace mckv {

/// Start from the exact similarity profile at time t0, boundary shifted to
/// x = 0, with the exact profile value imposed at x_max. This is the solver
/// oracle: the loss must then follow beta (sqrt(2(t0+t)) - sqrt(2 t0)) / alpha.
struct SelfsimInitial {
    double t0 = 0.5;
    double beta = 1.0;
};

using LinearInitial = std::variant<Density, SelfsimInitial>;

struct BlowupEvent {
    double time = 0.0;
    std::string trigger;
};

struct Snapshot {
    double t = 0.0;
    double s = 0.0;    // cumulative loss at snapshot time
    double flux = 0.0; // N at snapshot time
    std::vector<double> values;
};

/// Time-indexed record of a linear-model run: boundary flux N, cumulative
/// loss s, remaining mass, jump indicator, plus density snapshots.
struct LinearSolution {
    double h = 0.0;
    double x_max = 0.0;
    double alpha = 0.0;
    double dt_nominal = 0.0;
    double mass0 = 0.0;
    TimeSeries flux;      // N(t)
    TimeSeries loss;      // s(t)
    TimeSeries mass_ts;   // integral of p
    TimeSeries jump;      // jump indicator
    std::vector<Snapshot> snapshots;
    std::optional<BlowupEvent> blowup;
    bool selfsim_boundary = false;
};

/// Advances p_t = (1/2) p_xx + alpha N(t) p_x with absorbing boundary and
/// the per-step self-consistency N = (1/2) p_x(t,0): diffusion implicit,
/// drift explicit, N resolved by a fixed-point that is affine in N. Any
/// blow-up trigger stops the run and is recorded, not thrown.
LinearSolution solve_linear(const LinearInitial& initial, const ModelParams& params,
                            double T, const GridConfig& cfg);

struct MTransformReport {
    std::vector<double> m;        // on the boundary-anchored grid
    double interior_residual_max = 0.0;
    double boundary_m = 0.0;
    double boundary_mx = 0.0;
};

/// Double integral of 1 - alpha u measured from the free boundary, with the
/// residual of m_t = (1/2) m_xx - 1 assembled from three adjacent snapshots.
MTransformReport m_transform(const LinearSolution& sol, double t);

struct BarrierReport {
    bool ok = false;
    double sup_loss_ratio = 0.0; // max over t of alpha s(t) / (beta sqrt(2t))
    double max_flux_sqrt_t = 0.0;
};

/// Checks s(t) <= beta sqrt(2t) / alpha at every recorded time and that
/// N(t) sqrt(t) stays finite on [t_min, end].
BarrierReport barrier_check(const LinearSolution& sol, double beta, double t_min = 1e-2);

} // namespace mckv
