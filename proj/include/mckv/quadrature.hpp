#pragma once

#include <functional>
#include <vector>

namespace mckv::quad {

/// Adaptive Gauss-Kronrod 7/15 on [a,b] to an absolute tolerance.
/// Panels are bisected until |K15 - G7| meets the length-proportional
/// share of the tolerance. Intended for smooth integrands; this is the
/// oracle-grade quadrature backing beta_inf and the profile integrals.
double adaptive_gk15(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, int max_depth = 52);

/// Composite Simpson on a (possibly non-uniform) strictly increasing grid.
/// Pairs of adjacent intervals use the non-uniform three-point rule; an
/// odd trailing interval falls back to the trapezoid rule.
double composite_simpson(const std::vector<double>& x, const std::vector<double>& y);

/// Same rule on a uniform grid given by spacing h.
double composite_simpson_uniform(const std::vector<double>& y, double h);

/// Trapezoid prefix integral: out[i] = integral of the piecewise-linear
/// interpolant from x[0] to x[i].
void trapezoid_prefix(const std::vector<double>& x, const std::vector<double>& y,
                      std::vector<double>& out);
void trapezoid_prefix_uniform(const std::vector<double>& y, double h,
                              std::vector<double>& out);

} // namespace mckv::quad
