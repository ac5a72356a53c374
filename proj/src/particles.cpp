#include "mckv/particles.hpp"

#include <algorithm>
#include <cmath>

#include "mckv/csv.hpp"
#include "mckv/quadrature.hpp"
#include "mckv/rng.hpp"

namespace mckv {

namespace {

constexpr std::uint64_t kInitPurposeBase = 1000;

double sample_one(const ParticleInit& init, std::uint64_t seed, std::uint64_t stream) {
    if (init.delta_x0) return *init.delta_x0;
    const Density& d = *init.density;
    switch (d.kind()) {
        case DensityKind::Exponential: {
            const rng::Draw dr = rng::particle_draw(seed, stream, 0, kInitPurposeBase);
            return -std::log(1.0 - dr.uniform) / d.rate();
        }
        case DensityKind::GammaShape2: {
            const rng::Draw a = rng::particle_draw(seed, stream, 0, kInitPurposeBase);
            const rng::Draw b = rng::particle_draw(seed, stream, 0, kInitPurposeBase + 1);
            return -(std::log(1.0 - a.uniform) + std::log(1.0 - b.uniform)) / d.rate();
        }
        case DensityKind::NarrowGaussian: {
            // rejection below 0; each attempt uses its own counter block
            for (std::uint64_t attempt = 0;; ++attempt) {
                const rng::Draw dr =
                    rng::particle_draw(seed, stream, 0, kInitPurposeBase + attempt);
                const double x = d.center() + d.sigma() * dr.normal;
                if (x > 0.0) return x;
            }
        }
        case DensityKind::Tabulated: {
            const rng::Draw dr = rng::particle_draw(seed, stream, 0, kInitPurposeBase);
            // inverse CDF of the piecewise-linear density via trapezoid prefix
            std::vector<double> F;
            quad::trapezoid_prefix(d.grid(), d.values(), F);
            const double target = dr.uniform * F.back();
            auto it = std::upper_bound(F.begin(), F.end(), target);
            std::size_t i = std::min<std::size_t>(F.size() - 1,
                                                  static_cast<std::size_t>(it - F.begin()));
            if (i == 0) i = 1;
            const double span = F[i] - F[i - 1];
            const double w = span > 0.0 ? (target - F[i - 1]) / span : 0.0;
            return d.grid()[i - 1] + w * (d.grid()[i] - d.grid()[i - 1]);
        }
    }
    return 0.0;
}


} // namespace

long settle_cascade(ParticleEnsemble& e, long pending, double alpha, FeedbackModel model,
                    kernels::ExecMode mode) {
    const double n = static_cast<double>(e.size());
    long total = 0;
    while (pending > 0) {
        const long alive_now = e.alive_count();
        if (alive_now == 0 || alpha == 0.0) break;
        double shift;
        if (model == FeedbackModel::Linear)
            shift = -alpha * static_cast<double>(pending) / n;
        else
            shift = alpha * std::log(static_cast<double>(alive_now) /
                                     static_cast<double>(alive_now + pending));
        kernels::shift_alive(mode, e.positions, e.alive, shift);
        pending = kernels::mark_defaults(mode, e.positions, e.alive);
        e.defaulted += pending;
        total += pending;
    }
    return total;
}

ParticleEnsemble make_ensemble(std::size_t n, const ParticleInit& init,
                               std::uint64_t seed, kernels::ExecMode mode) {
    if (n < 100) throw ConfigError("make_ensemble: need at least 100 particles");
    if (!init.delta_x0 && !init.density)
        throw ConfigError("make_ensemble: initial condition not specified");
    ParticleEnsemble e;
    e.seed = seed;
    e.positions.resize(n);
    e.alive.assign(n, 1);
    e.streams.resize(n);
    for (std::size_t i = 0; i < n; ++i) e.streams[i] = i;
    const std::ptrdiff_t pn = static_cast<std::ptrdiff_t>(n);
    if (mode == kernels::ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < pn; ++i)
            e.positions[i] = sample_one(init, seed, e.streams[i]);
    } else {
        for (std::ptrdiff_t i = 0; i < pn; ++i)
            e.positions[i] = sample_one(init, seed, e.streams[i]);
    }
    return e;
}

long cascade_resolve(ParticleEnsemble& e, double alpha, FeedbackModel model,
                     kernels::ExecMode mode) {
    if (model == FeedbackModel::Linear && alpha < 0.0)
        throw ConfigError("cascade_resolve: alpha must be >= 0 for the linear model");
    long newly = kernels::mark_defaults(mode, e.positions, e.alive);
    e.defaulted += newly;
    return newly + settle_cascade(e, newly, alpha, model, mode);
}

SimulateResult simulate(const ParticleInit& init, const ModelParams& params,
                        const SimulateConfig& cfg) {
    params.validate();
    if (!(cfg.dt > 0.0)) throw ConfigError("simulate: dt must be > 0");
    if (cfg.dt >= cfg.T) throw ConfigError("simulate: dt must be < T");
    if (cfg.n < 100) throw ConfigError("simulate: need n >= 100");

    ParticleEnsemble e = make_ensemble(cfg.n, init, cfg.seed, cfg.mode);
    const double n = static_cast<double>(cfg.n);
    const bool linear = params.model == FeedbackModel::Linear;

    SimulateResult res;
    auto record = [&](double t, long newly) {
        const double frac_defaulted = static_cast<double>(e.defaulted) / n;
        res.aggregate.push(t, linear ? frac_defaulted : 1.0 - frac_defaulted);
        res.newly_defaulted.push(t, static_cast<double>(newly));
    };

    auto snap_times = cfg.snapshot_times;
    std::sort(snap_times.begin(), snap_times.end());
    std::size_t snap_idx = 0;
    auto take_snapshots_up_to = [&](double t) {
        while (snap_idx < snap_times.size() && t >= snap_times[snap_idx] - 0.5 * cfg.dt) {
            res.snapshots.push_back({t, e.positions, e.alive});
            ++snap_idx;
        }
    };

    // settle anything the sampler put at or below zero
    long initial = cascade_resolve(e, params.alpha, params.model, cfg.mode);
    record(0.0, initial);
    take_snapshots_up_to(0.0);

    kernels::EmStepParams sp;
    sp.seed = cfg.seed;
    sp.dt = cfg.dt;
    sp.sqrt_dt = std::sqrt(cfg.dt);
    sp.drift_dt = linear ? 0.0 : params.beta * cfg.dt;
    sp.bridge = cfg.bridge;

    const long steps = static_cast<long>(std::ceil(cfg.T / cfg.dt - 1e-12));
    for (long k = 1; k <= steps; ++k) {
        sp.step_index = static_cast<std::uint64_t>(k);
        long newly = kernels::em_step(cfg.mode, e.positions, e.alive, e.streams, sp);
        e.defaulted += newly;
        newly += settle_cascade(e, newly, params.alpha, params.model, cfg.mode);
        e.t = cfg.dt * static_cast<double>(k);
        res.max_single_step_loss_fraction =
            std::max(res.max_single_step_loss_fraction, static_cast<double>(newly) / n);
        if (k % cfg.record_stride == 0 || k == steps) record(e.t, newly);
        take_snapshots_up_to(e.t);
        if (e.alive_count() == 0) {
            res.terminated_early = true;
            break;
        }
    }
    return res;
}

void write_empirical_csv(const SimulateResult& r, const std::filesystem::path& path) {
    csv::Writer w(path, "t,loss_or_survival,newly_defaulted");
    for (std::size_t i = 0; i < r.aggregate.size(); ++i)
        w.row(r.aggregate.times[i], r.aggregate.values[i],
              static_cast<std::int64_t>(r.newly_defaulted.values[i]));
}

CompareReport compare_to_pde(const TimeSeries& empirical, const TimeSeries& pde,
                             std::size_t n, double h, double dt, double calibration) {
    if (empirical.empty() || pde.empty())
        throw ConfigError("compare_to_pde: empty series");
    const double lo = std::max(empirical.front_time(), pde.front_time());
    const double hi = std::min(empirical.back_time(), pde.back_time());
    if (!(hi > lo)) throw ConfigError("compare_to_pde: disjoint time windows");
    CompareReport rep;
    auto probe = [&](const TimeSeries& ts) {
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double t = ts.times[i];
            if (t < lo || t > hi) continue;
            rep.sup_distance = std::max(rep.sup_distance,
                                        std::abs(empirical.interp(t) - pde.interp(t)));
        }
    };
    probe(empirical);
    probe(pde);
    rep.tolerance = 3.0 *
                    std::max({1.0 / std::sqrt(static_cast<double>(n)), h, std::sqrt(dt)}) *
                    calibration;
    rep.pass = rep.sup_distance <= rep.tolerance;
    return rep;
}

} // namespace mckv
