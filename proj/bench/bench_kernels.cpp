// Timing harness comparing the serial reference kernels against their
// OpenMP counterparts, plus a whole-engine particle step comparison.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include <omp.h>

#include "mckv/kernels.hpp"
#include "mckv/particles.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        fn();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s) {
    std::printf("%-24s serial %9.4f ms   omp %9.4f ms   speedup %.2fx\n", name,
                serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s);
}

} // namespace

int main() {
    using namespace mckv;
    std::printf("threads available: %d\n", omp_get_max_threads());

    // particle EM step
    {
        const std::size_t n = 2'000'000;
        std::vector<double> pos(n, 1.0), pos2;
        std::vector<std::uint8_t> alive(n, 1), alive2;
        std::vector<std::uint64_t> streams(n);
        std::iota(streams.begin(), streams.end(), 0);
        kernels::EmStepParams p;
        p.seed = 42;
        p.dt = 1e-3;
        p.sqrt_dt = std::sqrt(p.dt);
        p.bridge = true;

        double s_serial = 0, s_par = 0;
        s_serial = time_best_of(3, [&] {
            auto q = pos;
            auto a = alive;
            p.step_index = 1;
            (void)kernels::em_step_serial(q, a, streams, p);
            pos2 = q;
            alive2 = a;
        });
        std::vector<double> pos_par;
        std::vector<std::uint8_t> alive_par;
        s_par = time_best_of(3, [&] {
            auto q = pos;
            auto a = alive;
            p.step_index = 1;
            (void)kernels::em_step_parallel(q, a, streams, p);
            pos_par = q;
            alive_par = a;
        });
        report("em_step", s_serial, s_par);
        if (pos_par != pos2 || alive_par != alive2)
            std::printf("  !! serial and parallel results differ\n");
    }

    // cascade counting + shifting
    {
        const std::size_t n = 5'000'000;
        std::vector<double> pos(n);
        std::vector<std::uint8_t> alive(n, 1);
        for (std::size_t i = 0; i < n; ++i)
            pos[i] = (static_cast<double>(i % 1000) - 10.0) / 1000.0;
        auto a1 = alive;
        auto a2 = alive;
        long c1 = 0, c2 = 0;
        const double s_serial = time_best_of(5, [&] {
            a1 = alive;
            c1 = kernels::mark_defaults_serial(pos, a1);
        });
        const double s_par = time_best_of(5, [&] {
            a2 = alive;
            c2 = kernels::mark_defaults_parallel(pos, a2);
        });
        report("mark_defaults", s_serial, s_par);
        if (c1 != c2 || a1 != a2) std::printf("  !! results differ\n");

        auto q1 = pos;
        auto q2 = pos;
        const double t1 = time_best_of(5, [&] { kernels::shift_alive_serial(q1, a1, -1e-3); });
        const double t2 = time_best_of(5, [&] { kernels::shift_alive_parallel(q2, a2, -1e-3); });
        report("shift_alive", t1, t2);
    }

    // PDE vector kernels
    {
        const std::size_t m = 4'000'000;
        std::vector<double> f(m), out1, out2, axp1, axp2;
        for (std::size_t i = 0; i < m; ++i) f[i] = std::sin(1e-3 * static_cast<double>(i));
        const double t1 =
            time_best_of(5, [&] { kernels::central_gradient_serial(f, 1e-3, 0, 0, out1); });
        const double t2 =
            time_best_of(5, [&] { kernels::central_gradient_parallel(f, 1e-3, 0, 0, out2); });
        report("central_gradient", t1, t2);
        if (out1 != out2) std::printf("  !! results differ\n");

        const double t3 = time_best_of(5, [&] { kernels::axpy_serial(f, out1, 0.5, axp1); });
        const double t4 = time_best_of(5, [&] { kernels::axpy_parallel(f, out2, 0.5, axp2); });
        report("axpy", t3, t4);
        if (axp1 != axp2) std::printf("  !! results differ\n");
    }

    // full particle engine, serial vs parallel execution mode
    {
        ParticleInit init;
        init.delta_x0 = 1.0;
        ModelParams mp;
        mp.model = FeedbackModel::Linear;
        mp.alpha = 0.5;
        SimulateConfig cfg;
        cfg.n = 100000;
        cfg.T = 0.5;
        cfg.dt = 1e-3;
        cfg.seed = 7;
        cfg.record_stride = 50;

        cfg.mode = kernels::ExecMode::Serial;
        SimulateResult rs;
        const double t1 = time_best_of(2, [&] { rs = simulate(init, mp, cfg); });
        cfg.mode = kernels::ExecMode::Parallel;
        SimulateResult rp;
        const double t2 = time_best_of(2, [&] { rp = simulate(init, mp, cfg); });
        report("simulate (n=1e5)", t1, t2);
        if (rs.aggregate.values != rp.aggregate.values)
            std::printf("  !! aggregate series differ between modes\n");
    }
    return 0;
}
