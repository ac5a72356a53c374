#pragma once

#include <cstddef>
#include <vector>

#include "mckv/errors.hpp"
#include "mckv/kernels.hpp"

namespace mckv {

/// Uniform spatial grid x_i = i h, i = 0..m, with Dirichlet ends.
struct GridConfig {
    double h = 1e-2;
    double dt = 5e-5;
    double x_max = 40.0;
    int record_stride = 100;
    std::vector<double> snapshot_times;
    kernels::ExecMode mode = kernels::ExecMode::Parallel;

    std::size_t node_count() const {
        return static_cast<std::size_t>(x_max / h + 0.5) + 1;
    }

    void validate() const {
        if (!(h > 0.0) || !(dt > 0.0) || !(x_max > 4.0 * h))
            throw ConfigError("grid: h, dt, x_max must be positive with x_max >> h");
        if (dt > 0.5 * h * h * (1.0 + 1e-9))
            throw ConfigError("grid: CFL violation, dt must not exceed h^2/2");
        if (record_stride < 1) throw ConfigError("grid: record_stride must be >= 1");
    }
};

/// Backward-Euler diffusion operator (I - (dt/2) D_xx) on the interior
/// nodes, factored once per dt and reused. solve2 runs two right-hand
/// sides through one fused Thomas sweep.
class ImplicitDiffusion {
public:
    void factor(std::size_t m_nodes, double sigma); // sigma = dt / (2 h^2)
    double sigma() const { return sigma_; }

    /// d1,d2 hold rhs values on nodes 0..m-1 (entries 1..m-2 meaningful);
    /// results overwrite the same index range; ends are left untouched.
    void solve2(std::vector<double>& d1, std::vector<double>& d2) const;

private:
    std::vector<double> cp_;  // modified upper-diagonal coefficients
    std::vector<double> inv_; // reciprocal pivots
    double sigma_ = -1.0;
    std::size_t m_ = 0;
};

/// One-sided second-order boundary flux (1/2) p_x(0) with p(0) = 0:
/// (4 p1 - p2) / (4 h).
double boundary_flux(const std::vector<double>& p, double h);

/// sup over grid nodes x > 0 of alpha * F(x) / x, F the trapezoid prefix
/// integral of p. Values >= 1 flag the physical-jump regime.
double jump_indicator(const std::vector<double>& p, double h, double alpha);

} // namespace mckv
