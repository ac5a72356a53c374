#include "mckv/criteria.hpp"

#include <cmath>
#include <limits>

#include "mckv/csv.hpp"

namespace mckv {

namespace {

constexpr double kDeficitMargin = 1e-10;
constexpr int kDeficitGridPoints = 10000;

struct DeficitScan {
    double global_min;    // decides the positive-margin condition
    double witness_value; // interior local minimum where the condition is tight
    double witness_x;
};

DeficitScan scan_deficit(const Density& p0, double alpha) {
    const double x_max = 40.0 * p0.length_scale();
    std::vector<double> xs(kDeficitGridPoints), ds(kDeficitGridPoints);
    for (int i = 0; i < kDeficitGridPoints; ++i) {
        xs[i] = x_max * (i + 1) / kDeficitGridPoints;
        ds[i] = partial_deficit(p0, alpha, xs[i]);
    }
    DeficitScan s{ds[0], ds[0], xs[0]};
    for (int i = 1; i < kDeficitGridPoints; ++i)
        s.global_min = std::min(s.global_min, ds[i]);
    // the deficit always sinks to 0 at x -> 0; the tight spot is the
    // interior local minimum when one exists
    double best_local = std::numeric_limits<double>::infinity();
    double best_local_x = -1.0;
    for (int i = 1; i + 1 < kDeficitGridPoints; ++i) {
        if (ds[i] <= ds[i - 1] && ds[i] <= ds[i + 1] && ds[i] < best_local) {
            best_local = ds[i];
            best_local_x = xs[i];
        }
    }
    if (best_local_x > 0.0) {
        s.witness_value = best_local;
        s.witness_x = best_local_x;
    }
    return s;
}

} // namespace

std::string to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::Blowup: return "Blowup";
        case VerdictKind::NoBlowup: return "NoBlowup";
        case VerdictKind::Indeterminate: return "Indeterminate";
    }
    return "?";
}

std::string Verdict::csv_record(FeedbackModel model, double alpha, double beta) const {
    std::string s = to_string(model);
    s += ',';
    s += csv::format_number(alpha);
    s += ',';
    s += csv::format_number(beta);
    s += ',';
    s += to_string(kind);
    s += ',';
    if (kind == VerdictKind::Blowup) s += csv::format_number(T_bound);
    s += ',';
    if (witness_mu) s += csv::format_number(*witness_mu);
    s += ',';
    if (witness_x) s += csv::format_number(*witness_x);
    return s;
}

std::vector<double> default_mu_grid() {
    std::vector<double> g(64);
    const double lo = std::log(1e-2), hi = std::log(1e3);
    for (int i = 0; i < 64; ++i) g[i] = std::exp(lo + (hi - lo) * i / 63.0);
    return g;
}

Verdict blowup_linear(const Density& p0, double alpha,
                      const std::vector<double>& mu_grid) {
    if (mu_grid.empty()) throw ConfigError("blowup_linear: empty mu grid");
    if (!(alpha > 0.0)) throw DomainError("blowup_linear: alpha must be > 0");

    const double m0 = mass(p0);
    Verdict v;

    // exponential-moment criterion: mu alpha E[e^{-mu X}] >= 1 forces a
    // blow-up before T(mu) = (2/mu^2) ln(mass / moment)
    double best_T = std::numeric_limits<double>::infinity();
    std::optional<double> best_mu;
    for (double mu : mu_grid) {
        if (!(mu > 0.0)) continue;
        const double em = exp_moment(p0, mu);
        if (mu * alpha * em >= 1.0) {
            const double T = 2.0 / (mu * mu) * std::log(m0 / em);
            if (T < best_T) {
                best_T = T;
                best_mu = mu;
            }
        }
    }
    if (best_mu) {
        v.kind = VerdictKind::Blowup;
        v.T_bound = best_T;
        v.witness_mu = best_mu;
        return v;
    }

    // mean criterion: alpha > 2 E[X] also rules out global solutions but
    // yields no computable time bound
    if (alpha > 2.0 * mean(p0)) {
        v.kind = VerdictKind::Blowup;
        v.T_bound = std::numeric_limits<double>::infinity();
        return v;
    }

    const DeficitScan scan = scan_deficit(p0, alpha);
    v.witness_x = scan.witness_x;
    v.min_deficit = scan.witness_value;
    if (p0.vanishes_at_endpoints() && scan.global_min > kDeficitMargin) {
        v.kind = VerdictKind::NoBlowup;
        return v;
    }
    v.kind = VerdictKind::Indeterminate;
    return v;
}

Verdict blowup_log(const Density& q0, double alpha, double beta,
                   const std::vector<double>& mu_grid) {
    if (mu_grid.empty()) throw ConfigError("blowup_log: empty mu grid");
    const double m0 = mass(q0);
    Verdict v;
    double best_T = std::numeric_limits<double>::infinity();
    std::optional<double> best_mu;
    for (double mu : mu_grid) {
        if (!(mu > 2.0 * beta) || !(mu > 0.0)) continue;
        const double em = exp_moment(q0, mu);
        if ((1.0 + alpha * mu) * em >= m0) {
            const double T = 2.0 / (mu * (mu - 2.0 * beta)) * std::log(m0 / em);
            if (T < best_T) {
                best_T = T;
                best_mu = mu;
            }
        }
    }
    if (best_mu) {
        v.kind = VerdictKind::Blowup;
        v.T_bound = best_T;
        v.witness_mu = best_mu;
        return v;
    }
    v.kind = VerdictKind::Indeterminate;
    return v;
}

Verdict delta_verdict(double x0, double alpha) {
    if (!(x0 > 0.0)) throw DomainError("delta_verdict: x0 must be > 0");
    if (!(alpha > 0.0)) throw DomainError("delta_verdict: alpha must be > 0");
    Verdict v;
    if (alpha < x0) {
        v.kind = VerdictKind::NoBlowup;
        return v;
    }
    if (alpha > 2.0 * x0) {
        v.kind = VerdictKind::Blowup;
        // moment criterion for a point mass: alpha mu e^{-mu x0} >= 1 is
        // feasible iff alpha >= e x0; T(mu) = 2 x0 / mu is smallest at the
        // largest feasible mu (the upper root of alpha mu e^{-mu x0} = 1)
        if (alpha >= std::exp(1.0) * x0) {
            double lo = 1.0 / x0, hi = 2.0 / x0;
            auto g = [&](double mu) { return std::log(alpha * mu) - mu * x0; };
            while (g(hi) > 0.0) hi *= 2.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (g(mid) > 0.0 ? lo : hi) = mid;
            }
            const double mu_star = 0.5 * (lo + hi);
            v.T_bound = 2.0 * x0 / mu_star;
            v.witness_mu = mu_star;
        } else {
            v.T_bound = std::numeric_limits<double>::infinity();
        }
        return v;
    }
    v.kind = VerdictKind::Indeterminate;
    return v;
}

} // namespace mckv
