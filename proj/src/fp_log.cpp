#include "mckv/fp_log.hpp"

#include <algorithm>
#include <cmath>

#include "mckv/quadrature.hpp"

namespace mckv {

namespace {

constexpr double kFixedPointTol = 1e-10;
constexpr int kFixedPointMaxIter = 50;
constexpr double kNegativeDensityTol = 1e-8;
constexpr double kFluxCflFactor = 1e3;
constexpr double kQbarFloor = 1e-300;

void check_sobolev_class(const std::vector<double>& q, double h) {
    double h1 = 0.0, sing = 0.0;
    const std::size_t i1 = std::min<std::size_t>(q.size() - 1,
                                                 static_cast<std::size_t>(1.0 / h));
    for (std::size_t i = 1; i < q.size(); ++i) {
        const double d = (q[i] - q[i - 1]) / h;
        h1 += d * d * h;
        if (i <= i1) sing += q[i] * q[i] / (static_cast<double>(i) * h) * h;
    }
    if (!std::isfinite(h1) || !std::isfinite(sing))
        throw ConfigError("solve_log: initial data outside the admissible class");
}

} // namespace

LogSolution solve_log(const Density& q0, const ModelParams& params, double T,
                      const LogGridConfig& cfg) {
    params.validate();
    if (params.model != FeedbackModel::Log)
        throw ConfigError("solve_log: params.model must be LogFeedback");
    cfg.validate();
    if (!(T > 0.0)) throw ConfigError("solve_log: T must be > 0");
    const double q0_mass = mass(q0);
    if (!(q0_mass > 0.0) || std::abs(q0_mass - 1.0) > 1e-3)
        throw InvalidDensityError("solve_log: q0 must have unit mass");

    const double h = cfg.h;
    const std::size_t m = cfg.node_count();
    const double alpha = params.alpha;
    const double beta = params.beta;

    LogSolution sol;
    sol.h = h;
    sol.x_max = cfg.x_max;
    sol.alpha = alpha;
    sol.beta = beta;
    sol.kappa = params.kappa;
    sol.dt_nominal = cfg.dt;

    if (q0(0.0) > 1e-6)
        throw ConfigError("solve_log: q0(0) must vanish");
    std::vector<double> r(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) r[i] = q0(static_cast<double>(i) * h);
    r[0] = 0.0;
    r[m - 1] = 0.0;
    check_sobolev_class(r, h);
    {
        const double rm = quad::composite_simpson_uniform(r, h);
        if (!(rm > 0.0)) throw InvalidDensityError("solve_log: empty initial grid mass");
        for (auto& v : r) v /= rm;
    }

    const EntropyKit kit(params.kappa);

    ImplicitDiffusion diff;
    double factored_dt = -1.0;
    std::vector<double> dxr(m), rhs1(m), rhs2(m);

    double t = 0.0;
    double qbar = q0_mass;
    double lambda = -boundary_flux(r, h);
    double cum_l2 = 0.0;

    auto snap_times = cfg.snapshot_times;
    std::sort(snap_times.begin(), snap_times.end());
    std::size_t snap_idx = 0;

    auto record = [&]() {
        if (!sol.lambda_ts.empty() && sol.lambda_ts.times.back() >= t) return;
        sol.lambda_ts.push(t, lambda);
        sol.qbar_ts.push(t, qbar);
        const EntropyPair ep = entropy_pair(r, h, lambda, kit);
        sol.I_ts.push(t, ep.I);
        sol.J_ts.push(t, ep.J);
        sol.lambda_l2_cum.push(t, cum_l2);
    };
    auto take_snapshot = [&]() {
        LogSnapshot sn;
        sn.t = t;
        sn.qbar = qbar;
        sn.lambda = lambda;
        sn.r = r;
        sol.snapshots.push_back(std::move(sn));
    };

    record();
    while (snap_idx < snap_times.size() && snap_times[snap_idx] <= 0.0) {
        take_snapshot();
        ++snap_idx;
    }

    long step = 0;
    while (t < T - 1e-14) {
        const double speed = std::abs(alpha * lambda + beta);
        double dt = std::min(cfg.dt, 0.5 * h * h / (1.0 + speed * h));
        dt = std::min(dt, T - t);
        if (dt != factored_dt) {
            diff.factor(m, dt / (2.0 * h * h));
            factored_dt = dt;
        }

        kernels::central_gradient(cfg.mode, r, h, 0.0, 0.0, dxr);
        for (std::size_t i = 1; i + 1 < m; ++i) {
            rhs1[i] = r[i] - dt * beta * dxr[i];
            rhs2[i] = alpha * dxr[i] + r[i];
        }
        diff.solve2(rhs1, rhs2); // rhs1 -> y1, rhs2 -> y2

        rhs1[0] = 0.0;
        rhs2[0] = 0.0;
        // boundary_flux returns (1/2) r_x(0), so lambda = -flux(r^{n+1}) and
        // r^{n+1} = y1 - dt lambda y2 makes the map affine:
        // lambda <- -flux(y1) + dt lambda flux(y2)
        const double a_term = -boundary_flux(rhs1, h);
        const double b_term = dt * boundary_flux(rhs2, h);
        double lam_new = lambda;
        bool converged = false;
        for (int it = 0; it < kFixedPointMaxIter; ++it) {
            const double next = a_term + b_term * lam_new;
            if (!std::isfinite(next)) break;
            if (std::abs(next - lam_new) < kFixedPointTol) {
                lam_new = next;
                converged = true;
                break;
            }
            lam_new = next;
        }
        if (!converged || !std::isfinite(lam_new) || std::abs(b_term) >= 1.0) {
            sol.blowup = BlowupEvent{t, "fixed_point_divergence"};
            record();
            take_snapshot();
            return sol;
        }

        const double cL = -dt * lam_new;
        double rmin = 0.0;
        for (std::size_t i = 1; i + 1 < m; ++i) {
            r[i] = rhs1[i] + cL * rhs2[i];
            rmin = std::min(rmin, r[i]);
        }
        r[0] = 0.0;
        r[m - 1] = 0.0;
        if (rmin < -kNegativeDensityTol)
            throw SchemeFailureError("solve_log: negative density beyond tolerance");

        const double rm = quad::composite_simpson_uniform(r, h);
        if (!(rm > 0.0))
            throw SchemeFailureError("solve_log: normalized mass collapsed");
        sol.max_mass_drift_per_step =
            std::max(sol.max_mass_drift_per_step, std::abs(rm - 1.0));
        const double inv = 1.0 / rm;
        for (std::size_t i = 1; i + 1 < m; ++i) r[i] *= inv;

        t += dt;
        lambda = lam_new;
        qbar *= std::exp(lambda * dt);
        cum_l2 += dt * lambda * lambda;
        ++step;

        std::string trigger;
        if (cum_l2 > cfg.lambda_l2_cap * (1.0 + t)) trigger = "lambda_l2_budget";
        else if (std::abs(lambda) * dt > kFluxCflFactor * h) trigger = "flux_cfl";
        if (!trigger.empty()) {
            sol.blowup = BlowupEvent{t, trigger};
            record();
            take_snapshot();
            return sol;
        }
        if (qbar < kQbarFloor) {
            sol.stop_reason = "survival_underflow";
            record();
            take_snapshot();
            return sol;
        }

        const bool at_end = t >= T - 1e-14;
        if (step % cfg.record_stride == 0 || at_end) record();
        while (snap_idx < snap_times.size() && t >= snap_times[snap_idx] - 0.5 * dt) {
            take_snapshot();
            ++snap_idx;
        }
    }
    return sol;
}

std::pair<TimeSeries, TimeSeries> entropy_series(const LogSolution& sol,
                                                 const EntropyKit& kit) {
    if (sol.snapshots.empty())
        throw ConfigError("entropy_series: no snapshots recorded");
    TimeSeries I, J;
    for (const auto& sn : sol.snapshots) {
        if (!I.empty() && sn.t <= I.times.back()) continue;
        const EntropyPair ep = entropy_pair(sn.r, sol.h, sn.lambda, kit);
        I.push(sn.t, ep.I);
        J.push(sn.t, ep.J);
    }
    return {std::move(I), std::move(J)};
}

LambdaBudget lambda_l2_budget(const LogSolution& sol, double window_frac) {
    LambdaBudget b;
    b.cumulative = sol.lambda_l2_cum;
    const double t_end = sol.lambda_l2_cum.back_time();
    const LinearFit fit =
        linear_fit_window(sol.lambda_l2_cum, window_frac * t_end, t_end);
    b.fit_slope = fit.slope;
    b.fit_intercept = fit.intercept;
    b.max_abs_residual = fit.max_abs_residual;
    return b;
}

} // namespace mckv
