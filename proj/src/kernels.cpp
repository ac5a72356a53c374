#include "mckv/kernels.hpp"

#include <cmath>
#include <cstddef>

#include "mckv/rng.hpp"

namespace mckv::kernels {

namespace {

// One particle's update, shared verbatim by the serial and parallel loops
// so the two execution modes cannot drift apart numerically.
inline long em_update_one(double& x, std::uint8_t& alive, std::uint64_t stream,
                          const EmStepParams& p) {
    if (!alive) return 0;
    const double x_old = x;
    const rng::Draw d = rng::particle_draw(p.seed, stream, p.step_index);
    const double x_new = x_old + p.drift_dt + p.sqrt_dt * d.normal;
    x = x_new;
    if (x_new <= 0.0) {
        alive = 0;
        return 1;
    }
    if (p.bridge && d.uniform < std::exp(-2.0 * x_old * x_new / p.dt)) {
        alive = 0;
        return 1;
    }
    return 0;
}

} // namespace

long em_step_serial(std::vector<double>& pos, std::vector<std::uint8_t>& alive,
                    const std::vector<std::uint64_t>& streams, const EmStepParams& p) {
    long hit = 0;
    const std::size_t n = pos.size();
    for (std::size_t i = 0; i < n; ++i)
        hit += em_update_one(pos[i], alive[i], streams[i], p);
    return hit;
}

long em_step_parallel(std::vector<double>& pos, std::vector<std::uint8_t>& alive,
                      const std::vector<std::uint64_t>& streams, const EmStepParams& p) {
    long hit = 0;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pos.size());
#pragma omp parallel for schedule(static) reduction(+ : hit)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        hit += em_update_one(pos[i], alive[i], streams[i], p);
    return hit;
}

long em_step(ExecMode mode, std::vector<double>& pos, std::vector<std::uint8_t>& alive,
             const std::vector<std::uint64_t>& streams, const EmStepParams& p) {
    return mode == ExecMode::Serial ? em_step_serial(pos, alive, streams, p)
                                    : em_step_parallel(pos, alive, streams, p);
}

long mark_defaults_serial(const std::vector<double>& pos, std::vector<std::uint8_t>& alive) {
    long hit = 0;
    const std::size_t n = pos.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (alive[i] && pos[i] <= 0.0) {
            alive[i] = 0;
            ++hit;
        }
    }
    return hit;
}

long mark_defaults_parallel(const std::vector<double>& pos, std::vector<std::uint8_t>& alive) {
    long hit = 0;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pos.size());
#pragma omp parallel for schedule(static) reduction(+ : hit)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (alive[i] && pos[i] <= 0.0) {
            alive[i] = 0;
            ++hit;
        }
    }
    return hit;
}

long mark_defaults(ExecMode mode, const std::vector<double>& pos,
                   std::vector<std::uint8_t>& alive) {
    return mode == ExecMode::Serial ? mark_defaults_serial(pos, alive)
                                    : mark_defaults_parallel(pos, alive);
}

void shift_alive_serial(std::vector<double>& pos, const std::vector<std::uint8_t>& alive,
                        double shift) {
    const std::size_t n = pos.size();
    for (std::size_t i = 0; i < n; ++i)
        if (alive[i]) pos[i] += shift;
}

void shift_alive_parallel(std::vector<double>& pos, const std::vector<std::uint8_t>& alive,
                          double shift) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pos.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        if (alive[i]) pos[i] += shift;
}

void shift_alive(ExecMode mode, std::vector<double>& pos,
                 const std::vector<std::uint8_t>& alive, double shift) {
    mode == ExecMode::Serial ? shift_alive_serial(pos, alive, shift)
                             : shift_alive_parallel(pos, alive, shift);
}

void central_gradient_serial(const std::vector<double>& f, double h, double left_bc,
                             double right_bc, std::vector<double>& out) {
    const std::size_t m = f.size();
    out.resize(m);
    if (m < 3) return;
    const double inv2h = 0.5 / h;
    out[0] = 0.0;
    out[m - 1] = 0.0;
    out[1] = (f[2] - left_bc) * inv2h;
    for (std::size_t i = 2; i + 2 < m; ++i) out[i] = (f[i + 1] - f[i - 1]) * inv2h;
    out[m - 2] = (right_bc - f[m - 3]) * inv2h;
}

void central_gradient_parallel(const std::vector<double>& f, double h, double left_bc,
                               double right_bc, std::vector<double>& out) {
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(f.size());
    out.resize(f.size());
    if (m < 3) return;
    const double inv2h = 0.5 / h;
    out[0] = 0.0;
    out[m - 1] = 0.0;
    out[1] = (f[2] - left_bc) * inv2h;
    out[m - 2] = (right_bc - f[m - 3]) * inv2h;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 2; i < m - 2; ++i) out[i] = (f[i + 1] - f[i - 1]) * inv2h;
}

void central_gradient(ExecMode mode, const std::vector<double>& f, double h,
                      double left_bc, double right_bc, std::vector<double>& out) {
    mode == ExecMode::Serial ? central_gradient_serial(f, h, left_bc, right_bc, out)
                             : central_gradient_parallel(f, h, left_bc, right_bc, out);
}

void axpy_serial(const std::vector<double>& a, const std::vector<double>& b, double c,
                 std::vector<double>& out) {
    const std::size_t n = a.size();
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + c * b[i];
}

void axpy_parallel(const std::vector<double>& a, const std::vector<double>& b, double c,
                   std::vector<double>& out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
    out.resize(a.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a[i] + c * b[i];
}

void axpy(ExecMode mode, const std::vector<double>& a, const std::vector<double>& b,
          double c, std::vector<double>& out) {
    mode == ExecMode::Serial ? axpy_serial(a, b, c, out) : axpy_parallel(a, b, c, out);
}

} // namespace mckv::kernels
