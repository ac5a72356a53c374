#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "mckv/density.hpp"
#include "mckv/kernels.hpp"
#include "mckv/timeseries.hpp"

namespace mckv {

/// Interacting ensemble for the hitting-time dynamics. Dead particles are
/// frozen at their crossing-step position; aggregates are pure counts, so
/// they are exact and independent of particle order and thread count.
struct ParticleEnsemble {
    std::vector<double> positions;
    std::vector<std::uint8_t> alive;
    std::vector<std::uint64_t> streams; // RNG stream id per particle
    std::uint64_t seed = 0;
    long defaulted = 0;
    double t = 0.0;

    std::size_t size() const { return positions.size(); }
    long alive_count() const { return static_cast<long>(positions.size()) - defaulted; }
};

/// Initial condition for the ensemble: an exact point mass or draws from a
/// Density (inverse-CDF or exact transforms per kind).
struct ParticleInit {
    std::optional<double> delta_x0; // point mass when set
    std::optional<Density> density;
};

ParticleEnsemble make_ensemble(std::size_t n, const ParticleInit& init,
                               std::uint64_t seed,
                               kernels::ExecMode mode = kernels::ExecMode::Parallel);

/// Resolves one default cascade: repeatedly absorb non-positive particles
/// and apply the feedback shift to survivors until no new defaults appear.
/// Defaults within a sub-iteration are simultaneous. Returns the total
/// newly defaulted count of the event. In the log model a fully defaulted
/// ensemble is terminal (survivor shift would be log 0).
long cascade_resolve(ParticleEnsemble& e, double alpha, FeedbackModel model,
                     kernels::ExecMode mode = kernels::ExecMode::Parallel);

/// Applies the feedback owed for `pending` already-marked deaths, then keeps
/// resolving follow-on defaults until the cascade settles. Returns the
/// follow-on count (excludes `pending`). This is the step-level entry point:
/// the Euler-Maruyama kernel marks its own absorptions.
long settle_cascade(ParticleEnsemble& e, long pending, double alpha, FeedbackModel model,
                    kernels::ExecMode mode = kernels::ExecMode::Parallel);

struct SimulateConfig {
    std::size_t n = 100000;
    double T = 1.0;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    bool bridge = true;
    kernels::ExecMode mode = kernels::ExecMode::Parallel;
    int record_stride = 1;
    std::vector<double> snapshot_times; // optional particle-path dumps
};

struct PathSnapshot {
    double t = 0.0;
    std::vector<double> positions;
    std::vector<std::uint8_t> alive;
};

struct SimulateResult {
    TimeSeries aggregate;       // loss s_n(t) (linear) or survival (log)
    TimeSeries newly_defaulted; // per recorded step, cascade totals included
    std::vector<PathSnapshot> snapshots;
    bool terminated_early = false; // all particles defaulted (log model)
    double max_single_step_loss_fraction = 0.0;
};

/// Euler-Maruyama with absorption plus per-step cascade resolution.
/// Deterministic given (seed, n, dt, params) for any thread count.
SimulateResult simulate(const ParticleInit& init, const ModelParams& params,
                        const SimulateConfig& cfg);

void write_empirical_csv(const SimulateResult& r, const std::filesystem::path& path);

struct CompareReport {
    double sup_distance = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Sup distance between two series on their overlapping window (linear
/// interpolation), judged against 3 max(n^{-1/2}, h, sqrt(dt)) * calibration.
CompareReport compare_to_pde(const TimeSeries& empirical, const TimeSeries& pde,
                             std::size_t n, double h, double dt,
                             double calibration = 1.0);

} // namespace mckv
