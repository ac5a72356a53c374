#include "mckv/fp_grid.hpp"

#include <algorithm>
#include <cmath>

namespace mckv {

void ImplicitDiffusion::factor(std::size_t m_nodes, double sigma) {
    m_ = m_nodes;
    sigma_ = sigma;
    const double b = 1.0 + 2.0 * sigma;
    const double a = -sigma; // sub- and super-diagonal
    cp_.resize(m_);
    inv_.resize(m_);
    const std::size_t last = m_ - 2; // interior nodes 1..last
    inv_[1] = 1.0 / b;
    cp_[1] = a * inv_[1];
    for (std::size_t i = 2; i <= last; ++i) {
        const double den = b - a * cp_[i - 1];
        inv_[i] = 1.0 / den;
        cp_[i] = a * inv_[i];
    }
}

void ImplicitDiffusion::solve2(std::vector<double>& d1, std::vector<double>& d2) const {
    const double a = -sigma_;
    const std::size_t last = m_ - 2;
    d1[1] *= inv_[1];
    d2[1] *= inv_[1];
    for (std::size_t i = 2; i <= last; ++i) {
        d1[i] = (d1[i] - a * d1[i - 1]) * inv_[i];
        d2[i] = (d2[i] - a * d2[i - 1]) * inv_[i];
    }
    for (std::size_t i = last; i-- > 1;) {
        d1[i] -= cp_[i] * d1[i + 1];
        d2[i] -= cp_[i] * d2[i + 1];
    }
}

double boundary_flux(const std::vector<double>& p, double h) {
    if (p.size() < 3) throw ConfigError("boundary_flux: need at least 3 nodes");
    if (!(h > 0.0)) throw ConfigError("boundary_flux: h must be > 0");
    return (4.0 * p[1] - p[2]) / (4.0 * h);
}

double jump_indicator(const std::vector<double>& p, double h, double alpha) {
    if (alpha == 0.0) return 0.0;
    double best = 0.0;
    double F = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        F += 0.5 * h * (p[i] + p[i - 1]);
        best = std::max(best, F / (static_cast<double>(i) * h));
    }
    return alpha * best;
}

} // namespace mckv
