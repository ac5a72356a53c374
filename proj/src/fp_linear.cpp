#include "mckv/fp_linear.hpp"

#include <algorithm>
#include <cmath>

#include "mckv/quadrature.hpp"

namespace mckv {

namespace {

constexpr double kFixedPointTol = 1e-10;
constexpr int kFixedPointMaxIter = 50;
constexpr double kNegativeDensityTol = 1e-8;
constexpr double kFluxCflFactor = 1e3;
constexpr double kMassLossStepFraction = 0.01;

// Right-boundary Dirichlet data. For oracle runs the exact profile value is
// precomputed on a dense time table; elsewhere it is identically zero.
struct RightBoundary {
    bool selfsim = false;
    std::vector<double> table;
    double t_end = 0.0;

    void build(const SelfSimilar& ss, double t0, double x_max, double T) {
        selfsim = true;
        t_end = T;
        const std::size_t n = std::max<std::size_t>(2048, static_cast<std::size_t>(T / 2.5e-4)) + 1;
        table.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = T * static_cast<double>(i) / static_cast<double>(n - 1);
            table[i] = U_eval(ss, t0 + t, x_max + ss.alpha * S_eval(ss, t0 + t));
        }
    }

    double value(double t) const {
        if (!selfsim) return 0.0;
        const double u = std::clamp(t / t_end, 0.0, 1.0) * static_cast<double>(table.size() - 1);
        const std::size_t i = std::min(static_cast<std::size_t>(u), table.size() - 2);
        const double w = u - static_cast<double>(i);
        return (1.0 - w) * table[i] + w * table[i + 1];
    }
};

// One backward-Euler step with the drift coefficient resolved through the
// affine map N -> flux(y1) + dt alpha flux(y2) N. Forward and backward
// Thomas sweeps for both right-hand sides run fused, reading p in place.
struct Stepper {
    std::size_t m = 0;
    double h = 0.0;
    double alpha = 0.0;
    double factored_dt = -1.0;
    std::vector<double> cp, inv; // Thomas factors for the current dt
    std::vector<double> y1, y2;
    std::vector<double> inv_x;   // 1 / (i h) for the jump indicator

    void init(std::size_t nodes, double spacing, double a) {
        m = nodes;
        h = spacing;
        alpha = a;
        cp.assign(m, 0.0);
        inv.assign(m, 0.0);
        y1.assign(m, 0.0);
        y2.assign(m, 0.0);
        inv_x.assign(m, 0.0);
        for (std::size_t i = 1; i < m; ++i) inv_x[i] = 1.0 / (static_cast<double>(i) * h);
    }

    void factor(double dt) {
        const double sigma = dt / (2.0 * h * h);
        const double b = 1.0 + 2.0 * sigma;
        const double a = -sigma;
        const std::size_t last = m - 2;
        inv[1] = 1.0 / b;
        cp[1] = a * inv[1];
        for (std::size_t i = 2; i <= last; ++i) {
            const double den = b - a * cp[i - 1];
            inv[i] = 1.0 / den;
            cp[i] = a * inv[i];
        }
        factored_dt = dt;
    }

    struct Result {
        double N = 0.0;
        double pmin = 0.0;
        double jump = 0.0;
        bool diverged = false;
    };

    Result advance(std::vector<double>& p, double dt, double N_prev, double bc_new) {
        const double sigma = dt / (2.0 * h * h);
        const double a = -sigma;
        const double inv2h = 0.5 / h;
        const std::size_t last = m - 2;

        // forward elimination, rhs1 = p (+ boundary term), rhs2 = D_x p
        {
            const double r1 = p[1];
            const double r2 = (p[2] - 0.0) * inv2h;
            y1[1] = r1 * inv[1];
            y2[1] = r2 * inv[1];
        }
        for (std::size_t i = 2; i <= last; ++i) {
            const double r1 = p[i] + (i == last ? sigma * bc_new : 0.0);
            const double r2 = (p[i + 1] - p[i - 1]) * inv2h;
            y1[i] = (r1 - a * y1[i - 1]) * inv[i];
            y2[i] = (r2 - a * y2[i - 1]) * inv[i];
        }
        for (std::size_t i = last; i-- > 1;) {
            y1[i] -= cp[i] * y1[i + 1];
            y2[i] -= cp[i] * y2[i + 1];
        }

        Result out;
        const double flux1 = (4.0 * y1[1] - y1[2]) / (4.0 * h);
        const double flux2 = (4.0 * y2[1] - y2[2]) / (4.0 * h);
        const double b_term = dt * alpha * flux2;
        double N = N_prev;
        bool converged = false;
        for (int it = 0; it < kFixedPointMaxIter; ++it) {
            const double next = flux1 + b_term * N;
            if (!std::isfinite(next)) break;
            if (std::abs(next - N) < kFixedPointTol) {
                N = next;
                converged = true;
                break;
            }
            N = next;
        }
        if (!converged || !std::isfinite(N) || std::abs(b_term) >= 1.0) {
            out.diverged = true;
            return out;
        }
        out.N = N;

        // combined update fused with the positivity and jump-indicator scan
        const double cN = dt * alpha * N;
        double pmin = 0.0;
        double F = 0.0;
        double jmax = 0.0;
        double prev = 0.0; // p[0] = 0
        const double half_h = 0.5 * h;
        for (std::size_t i = 1; i <= last; ++i) {
            const double v = y1[i] + cN * y2[i];
            p[i] = v;
            pmin = std::min(pmin, v);
            F += half_h * (v + prev);
            prev = v;
            jmax = std::max(jmax, F * inv_x[i]);
        }
        p[m - 1] = bc_new;
        F += half_h * (bc_new + prev);
        jmax = std::max(jmax, F * inv_x[m - 1]);
        out.pmin = pmin;
        out.jump = alpha * jmax;
        return out;
    }
};

} // namespace

LinearSolution solve_linear(const LinearInitial& initial, const ModelParams& params,
                            double T, const GridConfig& cfg) {
    params.validate();
    if (params.model != FeedbackModel::Linear)
        throw ConfigError("solve_linear: params.model must be LinearFeedback");
    cfg.validate();
    if (!(T > 0.0)) throw ConfigError("solve_linear: T must be > 0");

    const double h = cfg.h;
    const std::size_t m = cfg.node_count(); // nodes 0..m-1
    const double alpha = params.alpha;

    LinearSolution sol;
    sol.h = h;
    sol.x_max = cfg.x_max;
    sol.alpha = alpha;
    sol.dt_nominal = cfg.dt;

    std::vector<double> p(m, 0.0);
    RightBoundary rb;

    if (std::holds_alternative<SelfsimInitial>(initial)) {
        const auto& si = std::get<SelfsimInitial>(initial);
        const SelfSimilar ss{0.0, si.beta, alpha};
        rb.build(ss, si.t0, cfg.x_max, T);
        sol.selfsim_boundary = true;
        const double shift = alpha * S_eval(ss, si.t0);
        for (std::size_t i = 1; i < m; ++i)
            p[i] = U_eval(ss, si.t0, static_cast<double>(i) * h + shift);
    } else {
        const Density& p0 = std::get<Density>(initial);
        const double m0 = mass(p0);
        if (!(m0 > 0.0) || m0 > 1.0 + 1e-6)
            throw InvalidDensityError("solve_linear: initial mass must lie in (0, 1]");
        for (std::size_t i = 1; i + 1 < m; ++i)
            p[i] = p0(static_cast<double>(i) * h);
        p[m - 1] = 0.0;
    }
    p[0] = 0.0;

    sol.mass0 = quad::composite_simpson_uniform(p, h);

    Stepper stepper;
    stepper.init(m, h, alpha);

    double t = 0.0;
    double s = 0.0;
    double N = boundary_flux(p, h);

    auto snap_times = cfg.snapshot_times;
    std::sort(snap_times.begin(), snap_times.end());
    std::size_t snap_idx = 0;

    auto record = [&](double ji) {
        if (!sol.flux.empty() && sol.flux.times.back() >= t) return;
        sol.flux.push(t, N);
        sol.loss.push(t, s);
        sol.mass_ts.push(t, quad::composite_simpson_uniform(p, h));
        sol.jump.push(t, ji);
    };
    auto take_snapshot = [&]() {
        Snapshot sn;
        sn.t = t;
        sn.s = s;
        sn.flux = N;
        sn.values = p;
        sol.snapshots.push_back(std::move(sn));
    };

    double ji = jump_indicator(p, h, alpha);
    record(ji);
    while (snap_idx < snap_times.size() && snap_times[snap_idx] <= 0.0) {
        take_snapshot();
        ++snap_idx;
    }
    if (ji >= 1.0) {
        // the initial data already supports a macroscopic cascade
        sol.blowup = BlowupEvent{0.0, "jump_indicator"};
        return sol;
    }

    long step = 0;
    while (t < T - 1e-14) {
        // explicit-drift step restriction, enforced with hysteresis: the
        // factored dt is kept until it violates the bound (or overshoots T)
        const double bound = 0.5 * h * h / (1.0 + alpha * std::max(N, 0.0) * h);
        const double remaining = T - t;
        double dt = stepper.factored_dt;
        if (dt <= 0.0 || dt > bound || dt > remaining) {
            dt = std::min(cfg.dt, remaining);
            if (dt > bound) dt = 0.98 * bound;
            stepper.factor(dt);
        }
        const double bc_new = rb.value(t + dt);

        const Stepper::Result res = stepper.advance(p, dt, N, bc_new);
        if (res.diverged) {
            sol.blowup = BlowupEvent{t, "fixed_point_divergence"};
            record(ji);
            take_snapshot();
            return sol;
        }
        if (res.pmin < -kNegativeDensityTol)
            throw SchemeFailureError("solve_linear: negative density beyond tolerance");

        t += dt;
        N = res.N;
        const double ds = dt * N;
        s += ds;
        ji = res.jump;
        ++step;

        std::string trigger;
        if (ji >= 1.0) trigger = "jump_indicator";
        else if (N * dt > kFluxCflFactor * h) trigger = "flux_cfl";
        else if (!sol.selfsim_boundary && ds > kMassLossStepFraction * sol.mass0)
            trigger = "mass_loss_step";
        if (!trigger.empty()) {
            sol.blowup = BlowupEvent{t, trigger};
            record(ji);
            take_snapshot();
            return sol;
        }

        const bool at_end = t >= T - 1e-14;
        if (step % cfg.record_stride == 0 || at_end) record(ji);
        while (snap_idx < snap_times.size() && t >= snap_times[snap_idx] - 0.5 * dt) {
            take_snapshot();
            ++snap_idx;
        }
    }
    return sol;
}

MTransformReport m_transform(const LinearSolution& sol, double t) {
    // locate the snapshot nearest t and its two neighbors for differencing
    const auto& snaps = sol.snapshots;
    std::size_t c = snaps.size();
    double best = 0.05; // snapshots farther than this do not count as "at t"
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        if (std::abs(snaps[i].t - t) < best) {
            best = std::abs(snaps[i].t - t);
            c = i;
        }
    }
    if (c == snaps.size() || c == 0 || c + 1 >= snaps.size())
        throw ConfigError("m_transform: need snapshots at t and at both neighbors");
    const Snapshot& lo = snaps[c - 1];
    const Snapshot& mid = snaps[c];
    const Snapshot& hi = snaps[c + 1];
    if (hi.t - lo.t > 0.2)
        throw ConfigError("m_transform: snapshots too sparse in time");

    const double h = sol.h;
    const double alpha = sol.alpha;
    const std::size_t m = mid.values.size();

    // build m(t, .) on the boundary-anchored grid for each snapshot:
    // inner = prefix of 2 (1 - alpha u), mgrid = prefix of inner. The factor
    // 2 normalizes the transform so that m_t = (1/2) m_xx - 1 holds exactly
    // (with integrand 1 - alpha u the source constant would be 1/2).
    auto build = [&](const Snapshot& sn, std::vector<double>& inner,
                     std::vector<double>& mgrid) {
        std::vector<double> g(m);
        for (std::size_t i = 0; i < m; ++i) g[i] = 2.0 * (1.0 - alpha * sn.values[i]);
        quad::trapezoid_prefix_uniform(g, h, inner);
        quad::trapezoid_prefix_uniform(inner, h, mgrid);
    };
    std::vector<double> inner_lo, m_lo, inner_mid, m_mid, inner_hi, m_hi;
    build(lo, inner_lo, m_lo);
    build(mid, inner_mid, m_mid);
    build(hi, inner_hi, m_hi);

    MTransformReport rep;
    rep.m = m_mid;
    rep.boundary_m = std::abs(m_mid[0]);
    rep.boundary_mx = std::abs(inner_mid[0]);

    // residual of m_t = (1/2) m_xx - 1 in the fixed frame:
    // m_t = (d/dt of the anchored transform) - alpha N m_x
    const double inv_dt2 = 1.0 / (hi.t - lo.t);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double mt_anchored = (m_hi[i] - m_lo[i]) * inv_dt2;
        const double mt = mt_anchored - alpha * mid.flux * inner_mid[i];
        const double mxx = (m_mid[i + 1] - 2.0 * m_mid[i] + m_mid[i - 1]) / (h * h);
        rep.interior_residual_max =
            std::max(rep.interior_residual_max, std::abs(mt - 0.5 * mxx + 1.0));
    }
    return rep;
}

BarrierReport barrier_check(const LinearSolution& sol, double beta, double t_min) {
    BarrierReport rep;
    rep.ok = true;
    for (std::size_t i = 0; i < sol.loss.size(); ++i) {
        const double t = sol.loss.times[i];
        if (t <= 0.0) continue;
        const double barrier = beta * std::sqrt(2.0 * t);
        const double ratio = sol.alpha * sol.loss.values[i] / barrier;
        rep.sup_loss_ratio = std::max(rep.sup_loss_ratio, ratio);
        if (sol.alpha * sol.loss.values[i] > barrier + 1e-9) rep.ok = false;
        if (t >= t_min) {
            const double v = sol.flux.values[i] * std::sqrt(t);
            if (!std::isfinite(v)) rep.ok = false;
            rep.max_flux_sqrt_t = std::max(rep.max_flux_sqrt_t, v);
        }
    }
    return rep;
}

} // namespace mckv
