#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mckv/fp_log.hpp"
#include "mckv/quadrature.hpp"

using namespace mckv;

namespace {

ModelParams log_params(double alpha, double beta, double kappa = 0.125) {
    ModelParams p;
    p.model = FeedbackModel::Log;
    p.alpha = alpha;
    p.beta = beta;
    p.kappa = kappa;
    return p;
}

LogGridConfig log_grid(double h, double dt, double x_max, int stride = 200) {
    LogGridConfig g;
    g.h = h;
    g.dt = dt;
    g.x_max = x_max;
    g.record_stride = stride;
    return g;
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// survival of drifted BM started at x0 > 0, absorbed at 0
double drifted_survival(double x0, double beta, double t) {
    return norm_cdf((x0 + beta * t) / std::sqrt(t)) -
           std::exp(-2.0 * beta * x0) * norm_cdf((beta * t - x0) / std::sqrt(t));
}

} // namespace

TEST_CASE("phi bump: values and one-sided derivative bound") {
    CHECK(phi_bump(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(phi_bump(1.0) == 0.0);
    CHECK(phi_bump(3.0) == 0.0);
    // 0 <= -phi_x <= phi on (0, 1/4)
    for (double x = 0.01; x < 0.25; x += 0.01) {
        const PhiDerivs d = phi_derivs(x);
        CHECK(-d.phi_x >= 0.0);
        CHECK(-d.phi_x <= d.phi);
    }
    CHECK_THROWS_AS((void)phi_bump(-0.1), DomainError);
}

TEST_CASE("phi derivatives match finite differences") {
    const double eps = 1e-6;
    for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const PhiDerivs d = phi_derivs(x);
        const double fd1 = (phi_bump(x + eps) - phi_bump(x - eps)) / (2.0 * eps);
        const double fd2 =
            (phi_bump(x + eps) - 2.0 * phi_bump(x) + phi_bump(x - eps)) / (eps * eps);
        const double fd3 = (phi_derivs(x + eps).phi_xx - phi_derivs(x - eps).phi_xx) /
                           (2.0 * eps);
        CHECK(d.phi_x == doctest::Approx(fd1).epsilon(1e-5));
        CHECK(d.phi_xx == doctest::Approx(fd2).epsilon(1e-4));
        CHECK(d.phi_xxx == doctest::Approx(fd3).epsilon(1e-4));
    }
}

TEST_CASE("phi_xx has a single sign change located by bisection") {
    // oracle: bisection on the closed form
    double lo = 0.1, hi = 0.99;
    REQUIRE(phi_derivs(lo).phi_xx < 0.0);
    REQUIRE(phi_derivs(hi).phi_xx > 0.0);
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (phi_derivs(mid).phi_xx < 0.0 ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    CHECK(root == doctest::Approx(0.75983568565159255).epsilon(1e-10)); // (1/3)^(1/4)
    for (double x = 0.02; x < root - 1e-3; x += 0.02)
        CHECK(phi_derivs(x).phi_xx <= 0.0);
}

TEST_CASE("omega: stationarity identities") {
    const double kappa = 0.125;
    const double c = std::sqrt(2.0 * kappa);
    CHECK(omega_x_eval(kappa, 0.0) == doctest::Approx(2.0 * kappa));
    // (1/2) w_xx + c w_x + kappa w = 0, checked by finite differences
    const double eps = 1e-5;
    for (double x : {0.2, 1.0, 3.0}) {
        const double wxx = (omega_eval(kappa, x + eps) - 2.0 * omega_eval(kappa, x) +
                            omega_eval(kappa, x - eps)) / (eps * eps);
        const double res = 0.5 * wxx + c * omega_x_eval(kappa, x) + kappa * omega_eval(kappa, x);
        CHECK(std::abs(res) < 1e-5);
    }
    // unit mass
    std::vector<double> w(40001);
    for (int i = 0; i <= 40000; ++i) w[i] = omega_eval(kappa, 80.0 * i / 40000.0);
    CHECK(quad::composite_simpson_uniform(w, 80.0 / 40000.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(EntropyKit(0.2), DomainError);
}

TEST_CASE("stationary oracle: omega stays fixed, lambda = -kappa") {
    // kappa = 1/8, alpha = 4, beta = 0 satisfies alpha kappa - beta = sqrt(2 kappa)
    LogGridConfig g = log_grid(0.02, 2e-4, 60.0, 500);
    g.snapshot_times = {0.5, 1.0, 1.5};
    const LogSolution sol =
        solve_log(Density::gamma_shape2(0.5), log_params(4.0, 0.0), 1.5, g);
    CHECK(!sol.blowup);
    const double kappa = 0.125;
    for (std::size_t i = 0; i < sol.lambda_ts.size(); ++i)
        CHECK(std::abs(sol.lambda_ts.values[i] + kappa) < 1e-3);
    // max-norm drift of the last snapshot from omega
    REQUIRE(!sol.snapshots.empty());
    double drift = 0.0;
    for (std::size_t i = 0; i < sol.snapshots.back().r.size(); ++i) {
        const double x = static_cast<double>(i) * g.h;
        drift = std::max(drift,
                         std::abs(sol.snapshots.back().r[i] - omega_eval(kappa, x)));
    }
    CHECK(drift < 1e-3);
    // I(t) constant at its initial value
    double imin = 1e300, imax = -1e300;
    for (double v : sol.I_ts.values) {
        imin = std::min(imin, v);
        imax = std::max(imax, v);
    }
    CHECK(imax - imin < 1e-4);
    // h(t,0) via L'Hopital equals -lambda/kappa = 1
    CHECK(-sol.lambda_ts.values.back() / kappa == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("stationary oracle: lambda budget accumulates kappa^2 t exactly") {
    const LogGridConfig g = log_grid(0.02, 2e-4, 60.0, 100);
    const LogSolution sol =
        solve_log(Density::gamma_shape2(0.5), log_params(4.0, 0.0), 1.0, g);
    const LambdaBudget b = lambda_l2_budget(sol);
    const double kappa2 = 0.125 * 0.125;
    for (std::size_t i = 0; i < b.cumulative.size(); ++i) {
        const double t = b.cumulative.times[i];
        CHECK(std::abs(b.cumulative.values[i] - kappa2 * t) < 2e-4 * (t + 1.0));
    }
    CHECK(b.fit_slope == doctest::Approx(kappa2).epsilon(5e-3));
}

TEST_CASE("first-passage oracle with drift: qbar matches the closed form") {
    const LogGridConfig g = log_grid(5e-3, 1.25e-5, 12.0, 2000);
    const LogSolution sol =
        solve_log(Density::narrow_gaussian(1.0, 0.05), log_params(0.0, 1.0), 1.5, g);
    CHECK(!sol.blowup);
    for (std::size_t i = 0; i < sol.qbar_ts.size(); ++i) {
        const double t = sol.qbar_ts.times[i];
        if (t < 0.05) continue;
        const double ref = drifted_survival(1.0, 1.0, t);
        CHECK(std::abs(sol.qbar_ts.values[i] - ref) < 0.02 * ref);
    }
}

TEST_CASE("blow-up run: lambda budget trigger before the criteria bound") {
    const LogGridConfig g = log_grid(5e-3, 1.25e-5, 30.0, 2000);
    const LogSolution sol =
        solve_log(Density::gamma_shape2(1.0), log_params(5.0, 0.0), 1.2, g);
    REQUIRE(sol.blowup.has_value());
    CHECK(sol.blowup->trigger == "lambda_l2_budget");
    CHECK(sol.blowup->time < std::log(3.0));
}

TEST_CASE("two lambda definitions agree on snapshots") {
    LogGridConfig g = log_grid(0.01, 5e-5, 12.0, 500);
    g.snapshot_times = {0.25, 0.5};
    const LogSolution sol =
        solve_log(Density::narrow_gaussian(1.0, 0.05), log_params(0.5, 1.0), 0.6, g);
    for (const auto& sn : sol.snapshots) {
        // q = r qbar; lambda = -(1/2) q_x(0) / integral q
        std::vector<double> q(sn.r.size());
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = sn.r[i] * sn.qbar;
        const double qmass = quad::composite_simpson_uniform(q, g.h);
        const double lam_q = -boundary_flux(q, g.h) / qmass;
        CHECK(std::abs(lam_q - sn.lambda) < 5e-3 * std::max(1.0, std::abs(sn.lambda)));
        // qbar reproduces the q mass
        CHECK(std::abs(qmass - sn.qbar) < 1e-8);
    }
}

TEST_CASE("survival lower bound from the fitted budget") {
    const LogGridConfig g = log_grid(0.01, 5e-5, 20.0, 500);
    const LogSolution sol =
        solve_log(Density::gamma_shape2(1.0), log_params(0.05, 2.0), 2.0, g);
    CHECK(!sol.blowup);
    for (std::size_t i = 1; i < sol.qbar_ts.size(); ++i) {
        const double t = sol.qbar_ts.times[i];
        const double cum = sol.lambda_l2_cum.values[i];
        // Cauchy-Schwarz: log qbar >= -sqrt(t cum)
        CHECK(sol.qbar_ts.values[i] >= std::exp(-std::sqrt(t * cum)) * (1.0 - 1e-6));
    }
}

TEST_CASE("per-step mass drift is tiny and renormalization holds the invariant") {
    const LogGridConfig g = log_grid(0.01, 5e-5, 20.0, 500);
    const LogSolution sol =
        solve_log(Density::gamma_shape2(1.0), log_params(0.05, 2.0), 1.0, g);
    CHECK(sol.max_mass_drift_per_step < 1e-5);
    const bool has_output = !sol.snapshots.empty() || !sol.qbar_ts.empty();
    REQUIRE(has_output);
}

TEST_CASE("lambda budget slope decreases in beta at fixed small alpha") {
    auto slope_at = [](double beta) {
        const LogGridConfig g = log_grid(0.02, 2e-4, 60.0, 200);
        const LogSolution sol =
            solve_log(Density::gamma_shape2(1.0), log_params(0.05, beta), 4.0, g);
        REQUIRE(!sol.blowup);
        return lambda_l2_budget(sol, 0.25).fit_slope;
    };
    const double s2 = slope_at(2.0);
    const double s4 = slope_at(4.0);
    CHECK(s2 > s4);
    CHECK(s4 >= 0.0);
}

TEST_CASE("entropy series recomputation matches the recorded series") {
    LogGridConfig g = log_grid(0.02, 2e-4, 60.0, 100);
    g.snapshot_times = {0.5, 1.0};
    const LogSolution sol =
        solve_log(Density::gamma_shape2(0.5), log_params(4.0, 0.0), 1.2, g);
    const auto [I, J] = entropy_series(sol, EntropyKit(0.125));
    REQUIRE(I.size() == 2);
    for (std::size_t i = 0; i < I.size(); ++i) {
        CHECK(I.values[i] == doctest::Approx(sol.I_ts.interp(I.times[i])).epsilon(1e-6));
        CHECK(J.values[i] >= 0.0);
    }
}

TEST_CASE("scheme failure surfaces when the budget trigger is disabled") {
    // with an absurd budget cap the run is allowed to push past the blow-up
    // and the discrete density eventually goes negative
    LogGridConfig g = log_grid(5e-3, 1.25e-5, 30.0, 2000);
    g.lambda_l2_cap = 1e6;
    CHECK_THROWS_AS(
        (void)solve_log(Density::gamma_shape2(1.0), log_params(5.0, 0.0), 1.2, g),
        SchemeFailureError);
}

TEST_CASE("solve_log validation") {
    LogGridConfig g = log_grid(0.01, 5e-5, 20.0);
    ModelParams p = log_params(0.5, 1.0);
    p.model = FeedbackModel::Linear;
    CHECK_THROWS_AS((void)solve_log(Density::gamma_shape2(1.0), p, 1.0, g), ConfigError);
    // q0(0) != 0 is outside the admissible class
    CHECK_THROWS_AS(
        (void)solve_log(Density::exponential(1.0), log_params(0.5, 1.0), 1.0, g),
        ConfigError);
}
