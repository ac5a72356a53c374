#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mckv/errors.hpp"

namespace mckv {

enum class FeedbackModel { Linear, Log };

/// Model parameters shared by criteria, solvers and the particle engine.
/// alpha is the feedback strength, beta the drift, kappa the auxiliary rate
/// used by the entropy diagnostics (admissible range (0, 1/8]).
struct ModelParams {
    double alpha = 0.0;
    double beta = 0.0;
    double kappa = 0.125;
    FeedbackModel model = FeedbackModel::Linear;

    void validate() const {
        if (!(kappa > 0.0) || kappa > 0.125)
            throw ConfigError("ModelParams: kappa must lie in (0, 1/8]");
        if (model == FeedbackModel::Linear && alpha < 0.0)
            throw ConfigError("ModelParams: alpha must be >= 0 for the linear model");
    }
};

std::string to_string(FeedbackModel m);

enum class DensityKind { Exponential, GammaShape2, NarrowGaussian, Tabulated };

/// A sub-probability density on [0, inf). Analytic kinds carry closed forms
/// for all moments; tabulated densities are piecewise linear between nodes
/// and integrated by composite Simpson on their grid.
class Density {
public:
    static Density exponential(double rate);
    static Density gamma_shape2(double rate);
    /// Gaussian centered at x0, truncated to x > 0 and renormalized.
    /// sigma <= 0 selects the default x0/50 (smoothed point mass).
    static Density narrow_gaussian(double x0, double sigma = -1.0);
    static Density tabulated(std::vector<double> grid, std::vector<double> values);

    DensityKind kind() const { return kind_; }
    double rate() const { return rate_; }
    double center() const { return x0_; }
    double sigma() const { return sigma_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }

    /// Pointwise evaluation (piecewise linear for tabulated kinds).
    double operator()(double x) const;

    /// integral of d over [0, x]
    double cdf(double x) const;

    /// Characteristic length, used for default domain truncation.
    double length_scale() const;

    /// True if the density vanishes (in the limsup sense) at 0 and infinity.
    /// Decided from the kind for analytic families, from endpoint values
    /// below 1e-6 for tabulated data.
    bool vanishes_at_endpoints() const;

    std::optional<double> value_at_zero() const;

    void write_csv(const std::filesystem::path& path) const;
    static Density read_csv(const std::filesystem::path& path);

private:
    Density() = default;
    void validate() const;

    DensityKind kind_ = DensityKind::Exponential;
    double rate_ = 1.0;
    double x0_ = 0.0;
    double sigma_ = 0.0;
    std::vector<double> grid_;
    std::vector<double> values_;
};

/// Total mass: closed form for analytic kinds, composite Simpson otherwise.
double mass(const Density& d);

/// integral of exp(-mu x) d(x) over [0, inf), mu >= 0.
double exp_moment(const Density& d, double mu);

/// First moment. Throws UnboundedMomentError if the tabulated tail looks
/// divergent under tail inspection.
double mean(const Density& d);

/// integral over (0, x) of (1 - alpha d(y)) dy. The running minimum of this
/// quantity is the global-solvability margin of the linear model.
double partial_deficit(const Density& d, double alpha, double x);

} // namespace mckv
