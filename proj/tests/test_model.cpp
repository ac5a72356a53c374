#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "mckv/density.hpp"
#include "mckv/quadrature.hpp"

using namespace mckv;

namespace {

// quadrature fallback used as the independent route for closed-form checks
double quad_mass(const Density& d, double x_lo, double x_hi, int n = 400001) {
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = x_lo + (x_hi - x_lo) * i / (n - 1);
        y[i] = d(x[i]);
    }
    return quad::composite_simpson(x, y);
}

Density tabulated_copy(const Density& d, double x_hi, int points) {
    std::vector<double> g(points), v(points);
    for (int i = 0; i < points; ++i) {
        g[i] = x_hi * i / (points - 1);
        v[i] = d(g[i]);
    }
    return Density::tabulated(std::move(g), std::move(v));
}

} // namespace

TEST_CASE("mass: normalized analytic families") {
    CHECK(mass(Density::exponential(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mass(Density::gamma_shape2(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mass(Density::narrow_gaussian(1.0, 0.05)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mass: tabulated copy of Exponential(1) on [0,40], 4000 points") {
    const Density t = tabulated_copy(Density::exponential(1.0), 40.0, 4000);
    CHECK(std::abs(mass(t) - 1.0) < 1e-6);
}

TEST_CASE("exp_moment closed forms") {
    CHECK(exp_moment(Density::exponential(1.0), 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(exp_moment(Density::gamma_shape2(1.0), 1.0) == doctest::Approx(0.25).epsilon(1e-14));
    // mu = 0 gives the mass for any kind
    CHECK(exp_moment(Density::gamma_shape2(2.0), 0.0) ==
          doctest::Approx(mass(Density::gamma_shape2(2.0))));
    const Density t = tabulated_copy(Density::exponential(1.0), 40.0, 4000);
    CHECK(exp_moment(t, 0.0) == doctest::Approx(mass(t)).epsilon(1e-12));
    CHECK_THROWS_AS((void)exp_moment(t, -0.5), DomainError);
}

TEST_CASE("exp_moment truncated-Gaussian closed form vs quadrature") {
    const Density g = Density::narrow_gaussian(1.0, 0.1);
    for (double mu : {0.1, 1.0, 5.0, 25.0}) {
        std::vector<double> x(200001), y(200001);
        for (int i = 0; i < 200001; ++i) {
            x[i] = 3.0 * i / 200000;
            y[i] = std::exp(-mu * x[i]) * g(x[i]);
        }
        const double ref = quad::composite_simpson(x, y);
        CHECK(exp_moment(g, mu) == doctest::Approx(ref).epsilon(1e-8));
    }
    // extreme mu must not overflow and must decay
    CHECK(exp_moment(g, 1e3) >= 0.0);
    CHECK(exp_moment(g, 1e3) < exp_moment(g, 1e2));
}

TEST_CASE("exp_moment is strictly decreasing in mu and bounded by mass") {
    for (const Density& d : {Density::exponential(0.7), Density::gamma_shape2(1.3),
                             Density::narrow_gaussian(1.0, 0.05)}) {
        double prev = exp_moment(d, 0.0);
        CHECK(prev == doctest::Approx(mass(d)));
        for (double mu : {0.05, 0.2, 1.0, 4.0, 20.0}) {
            const double cur = exp_moment(d, mu);
            CHECK(cur < prev);
            CHECK(cur <= mass(d));
            prev = cur;
        }
    }
}

TEST_CASE("mean closed forms and concentration") {
    CHECK(mean(Density::exponential(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean(Density::gamma_shape2(1.0)) == doctest::Approx(2.0).epsilon(1e-14));
    const double s = 0.01;
    CHECK(std::abs(mean(Density::narrow_gaussian(1.0, s)) - 1.0) < 3.0 * s);
}

TEST_CASE("mean: divergent tabulated tail is rejected") {
    // x * d(x) keeps growing towards the grid end
    std::vector<double> g(101), v(101);
    for (int i = 0; i <= 100; ++i) {
        g[i] = 100.0 * i / 100.0 + 1.0;
        v[i] = 1e-3; // flat tail, first moment dominated by the far end
    }
    g.insert(g.begin(), 0.0);
    v.insert(v.begin(), 0.0);
    const Density d = Density::tabulated(std::move(g), std::move(v));
    CHECK_THROWS_AS((void)mean(d), UnboundedMomentError);
}

TEST_CASE("partial_deficit worked values") {
    // closed-form antiderivative: 2 - 3 (1 - 3 e^{-2})
    const double expected = 2.0 - 3.0 * (1.0 - 3.0 * std::exp(-2.0));
    CHECK(partial_deficit(Density::gamma_shape2(1.0), 3.0, 2.0) ==
          doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(0.218).epsilon(5e-3));

    CHECK(partial_deficit(Density::exponential(1.0), 0.0, 7.5) == doctest::Approx(7.5));

    const double v = partial_deficit(Density::narrow_gaussian(1.0, 0.01), 0.5, 2.0);
    CHECK(std::abs(v - 1.5) < 0.01);
}

TEST_CASE("partial_deficit agrees with direct quadrature on analytic kinds") {
    for (const Density& d : {Density::exponential(1.0), Density::gamma_shape2(0.8),
                             Density::narrow_gaussian(1.0, 0.1)}) {
        for (double x : {0.5, 1.0, 2.5}) {
            const double direct = x - 2.0 * quad_mass(d, 0.0, x);
            CHECK(std::abs(partial_deficit(d, 2.0, x) - direct) < 1e-8);
        }
    }
}

TEST_CASE("tabulated validation") {
    CHECK_THROWS_AS(Density::tabulated({0.0, 1.0}, {0.1, std::nan("")}), InvalidDensityError);
    CHECK_THROWS_AS(Density::tabulated({0.0, 1.0, 0.5}, {0.1, 0.1, 0.1}), InvalidDensityError);
    CHECK_THROWS_AS(Density::tabulated({0.0, 1.0}, {-0.5, 0.1}), InvalidDensityError);
    // mass > 1 is rejected
    CHECK_THROWS_AS(Density::tabulated({0.0, 1.0, 2.0}, {2.0, 2.0, 2.0}), InvalidDensityError);
}

TEST_CASE("density CSV round trip") {
    const auto path = std::filesystem::temp_directory_path() / "mckv_density_rt.csv";
    const Density d = tabulated_copy(Density::gamma_shape2(1.0), 20.0, 500);
    d.write_csv(path);
    const Density back = Density::read_csv(path);
    REQUIRE(back.grid().size() == d.grid().size());
    for (std::size_t i = 0; i < d.grid().size(); ++i) {
        CHECK(back.grid()[i] == d.grid()[i]);
        CHECK(back.values()[i] == d.values()[i]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("ModelParams invariants") {
    ModelParams p;
    p.kappa = 0.2;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.kappa = 0.125;
    p.alpha = -1.0;
    p.model = FeedbackModel::Linear;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.model = FeedbackModel::Log; // any sign allowed
    CHECK_NOTHROW(p.validate());
}
