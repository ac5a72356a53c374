#pragma once

#include <cstdint>
#include <vector>

namespace mckv::kernels {

// Data-parallel inner loops, each in a serial reference version and an
// OpenMP version. The two must produce bit-identical results: per-element
// arithmetic is identical and the only reductions are integer counts.
// The serial versions are kept for testing and for the benchmark target.

enum class ExecMode { Serial, Parallel };

struct EmStepParams {
    std::uint64_t seed = 0;
    std::uint64_t step_index = 0;
    double drift_dt = 0.0;  // deterministic drift increment per step
    double sqrt_dt = 0.0;
    double dt = 0.0;
    bool bridge = false;    // Brownian-bridge crossing correction
};

/// Euler-Maruyama step with absorption at 0. Dead particles keep their
/// crossing-step position. Returns the number of new absorptions.
long em_step_serial(std::vector<double>& pos, std::vector<std::uint8_t>& alive,
                    const std::vector<std::uint64_t>& streams, const EmStepParams& p);
long em_step_parallel(std::vector<double>& pos, std::vector<std::uint8_t>& alive,
                      const std::vector<std::uint64_t>& streams, const EmStepParams& p);
long em_step(ExecMode mode, std::vector<double>& pos, std::vector<std::uint8_t>& alive,
             const std::vector<std::uint64_t>& streams, const EmStepParams& p);

/// Marks alive particles at or below zero as dead; returns how many.
long mark_defaults_serial(const std::vector<double>& pos, std::vector<std::uint8_t>& alive);
long mark_defaults_parallel(const std::vector<double>& pos, std::vector<std::uint8_t>& alive);
long mark_defaults(ExecMode mode, const std::vector<double>& pos,
                   std::vector<std::uint8_t>& alive);

/// pos[i] += shift for alive particles.
void shift_alive_serial(std::vector<double>& pos, const std::vector<std::uint8_t>& alive,
                        double shift);
void shift_alive_parallel(std::vector<double>& pos, const std::vector<std::uint8_t>& alive,
                          double shift);
void shift_alive(ExecMode mode, std::vector<double>& pos,
                 const std::vector<std::uint8_t>& alive, double shift);

/// Central-difference transport term for the PDE engines:
/// out[i] = (f[i+1] - f[i-1]) / (2h) on interior nodes; out[0] = out[m] = 0.
/// Endpoint neighbors are the Dirichlet values left_bc / right_bc.
void central_gradient_serial(const std::vector<double>& f, double h, double left_bc,
                             double right_bc, std::vector<double>& out);
void central_gradient_parallel(const std::vector<double>& f, double h, double left_bc,
                               double right_bc, std::vector<double>& out);
void central_gradient(ExecMode mode, const std::vector<double>& f, double h,
                      double left_bc, double right_bc, std::vector<double>& out);

/// out[i] = a[i] + c * b[i]
void axpy_serial(const std::vector<double>& a, const std::vector<double>& b, double c,
                 std::vector<double>& out);
void axpy_parallel(const std::vector<double>& a, const std::vector<double>& b, double c,
                   std::vector<double>& out);
void axpy(ExecMode mode, const std::vector<double>& a, const std::vector<double>& b,
          double c, std::vector<double>& out);

} // namespace mckv::kernels
