#include "mckv/density.hpp"

#include <algorithm>
#include <cmath>

#include "mckv/csv.hpp"
#include "mckv/quadrature.hpp"

namespace mckv {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

// log of the standard normal CDF, stable for very negative arguments
double log_norm_cdf(double z) {
    if (z > -8.0) return std::log(norm_cdf(z));
    const double z2 = z * z;
    // asymptotic expansion of Mills ratio
    return -0.5 * z2 - std::log(-z * std::sqrt(2.0 * M_PI)) +
           std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
}

} // namespace

std::string to_string(FeedbackModel m) {
    return m == FeedbackModel::Linear ? "linear" : "log";
}

Density Density::exponential(double rate) {
    if (!(rate > 0.0)) throw InvalidDensityError("exponential: rate must be > 0");
    Density d;
    d.kind_ = DensityKind::Exponential;
    d.rate_ = rate;
    return d;
}

Density Density::gamma_shape2(double rate) {
    if (!(rate > 0.0)) throw InvalidDensityError("gamma_shape2: rate must be > 0");
    Density d;
    d.kind_ = DensityKind::GammaShape2;
    d.rate_ = rate;
    return d;
}

Density Density::narrow_gaussian(double x0, double sigma) {
    if (!(x0 > 0.0)) throw InvalidDensityError("narrow_gaussian: center must be > 0");
    if (sigma <= 0.0) sigma = x0 / 50.0;
    Density d;
    d.kind_ = DensityKind::NarrowGaussian;
    d.x0_ = x0;
    d.sigma_ = sigma;
    return d;
}

Density Density::tabulated(std::vector<double> grid, std::vector<double> values) {
    Density d;
    d.kind_ = DensityKind::Tabulated;
    d.grid_ = std::move(grid);
    d.values_ = std::move(values);
    d.validate();
    return d;
}

void Density::validate() const {
    if (kind_ != DensityKind::Tabulated) return;
    if (grid_.size() != values_.size() || grid_.size() < 2)
        throw InvalidDensityError("tabulated: grid/value size mismatch or too short");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!std::isfinite(grid_[i]) || !std::isfinite(values_[i]))
            throw InvalidDensityError("tabulated: non-finite entry");
        if (values_[i] < -1e-12)
            throw InvalidDensityError("tabulated: negative density value");
        if (i > 0 && !(grid_[i] > grid_[i - 1]))
            throw InvalidDensityError("tabulated: grid must be strictly increasing");
    }
    if (grid_.front() < 0.0)
        throw InvalidDensityError("tabulated: support must lie in [0, inf)");
    const double m = quad::composite_simpson(grid_, values_);
    if (m > 1.0 + 1e-6)
        throw InvalidDensityError("tabulated: total mass exceeds 1");
}

double Density::operator()(double x) const {
    if (x < 0.0) return 0.0;
    switch (kind_) {
        case DensityKind::Exponential:
            return rate_ * std::exp(-rate_ * x);
        case DensityKind::GammaShape2:
            return rate_ * rate_ * x * std::exp(-rate_ * x);
        case DensityKind::NarrowGaussian: {
            const double z = (x - x0_) / sigma_;
            return norm_pdf(z) / (sigma_ * norm_cdf(x0_ / sigma_));
        }
        case DensityKind::Tabulated: {
            if (x <= grid_.front() || x >= grid_.back()) {
                if (x == grid_.front()) return values_.front();
                if (x == grid_.back()) return values_.back();
                return 0.0;
            }
            auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
            std::size_t i = static_cast<std::size_t>(it - grid_.begin());
            const double w = (x - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
            return (1.0 - w) * values_[i - 1] + w * values_[i];
        }
    }
    return 0.0;
}

double Density::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    switch (kind_) {
        case DensityKind::Exponential:
            return 1.0 - std::exp(-rate_ * x);
        case DensityKind::GammaShape2:
            return 1.0 - (1.0 + rate_ * x) * std::exp(-rate_ * x);
        case DensityKind::NarrowGaussian: {
            const double z0 = -x0_ / sigma_;
            return (norm_cdf((x - x0_) / sigma_) - norm_cdf(z0)) / norm_cdf(x0_ / sigma_);
        }
        case DensityKind::Tabulated: {
            // exact integral of the piecewise-linear interpolant
            if (x <= grid_.front()) return 0.0;
            double acc = 0.0;
            for (std::size_t i = 1; i < grid_.size(); ++i) {
                if (x >= grid_[i]) {
                    acc += 0.5 * (grid_[i] - grid_[i - 1]) * (values_[i] + values_[i - 1]);
                } else {
                    const double w = (x - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
                    const double vx = (1.0 - w) * values_[i - 1] + w * values_[i];
                    acc += 0.5 * (x - grid_[i - 1]) * (values_[i - 1] + vx);
                    break;
                }
            }
            return acc;
        }
    }
    return 0.0;
}

double Density::length_scale() const {
    switch (kind_) {
        case DensityKind::Exponential:
        case DensityKind::GammaShape2:
            return 1.0 / rate_;
        case DensityKind::NarrowGaussian:
            return x0_;
        case DensityKind::Tabulated:
            return std::max(grid_.back() / 40.0, 1e-12);
    }
    return 1.0;
}

bool Density::vanishes_at_endpoints() const {
    switch (kind_) {
        case DensityKind::Exponential:
            return false; // positive limit at x = 0
        case DensityKind::GammaShape2:
        case DensityKind::NarrowGaussian:
            return true;
        case DensityKind::Tabulated:
            return values_.front() < 1e-6 && values_.back() < 1e-6;
    }
    return false;
}

std::optional<double> Density::value_at_zero() const {
    switch (kind_) {
        case DensityKind::Exponential:
            return rate_;
        case DensityKind::GammaShape2:
            return 0.0;
        case DensityKind::NarrowGaussian:
            return (*this)(0.0);
        case DensityKind::Tabulated:
            return grid_.front() == 0.0 ? std::optional<double>(values_.front())
                                        : std::nullopt;
    }
    return std::nullopt;
}

void Density::write_csv(const std::filesystem::path& path) const {
    csv::Writer w(path, "x,density");
    if (kind_ == DensityKind::Tabulated) {
        for (std::size_t i = 0; i < grid_.size(); ++i) w.row(grid_[i], values_[i]);
        return;
    }
    // sample analytic kinds on a default grid
    const double xmax = 40.0 * length_scale();
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
        const double x = xmax * i / n;
        w.row(x, (*this)(x));
    }
}

Density Density::read_csv(const std::filesystem::path& path) {
    csv::Table t = csv::read_table(path);
    if (t.header.size() != 2 || t.header[0] != "x" || t.header[1] != "density")
        throw InvalidDensityError("density CSV must have header 'x,density'");
    std::vector<double> g, v;
    g.reserve(t.rows.size());
    v.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        if (r.size() != 2) throw InvalidDensityError("density CSV row must have 2 columns");
        g.push_back(r[0]);
        v.push_back(r[1]);
    }
    return tabulated(std::move(g), std::move(v));
}

double mass(const Density& d) {
    switch (d.kind()) {
        case DensityKind::Exponential:
        case DensityKind::GammaShape2:
            return 1.0;
        case DensityKind::NarrowGaussian:
            return 1.0;
        case DensityKind::Tabulated:
            return quad::composite_simpson(d.grid(), d.values());
    }
    return 0.0;
}

double exp_moment(const Density& d, double mu) {
    if (mu < 0.0) throw DomainError("exp_moment: mu must be >= 0");
    const double r = d.rate();
    switch (d.kind()) {
        case DensityKind::Exponential:
            return r / (r + mu);
        case DensityKind::GammaShape2:
            return (r * r) / ((r + mu) * (r + mu));
        case DensityKind::NarrowGaussian: {
            const double x0 = d.center(), s = d.sigma();
            // log-space evaluation of the truncated-Gaussian Laplace transform
            const double lg = -mu * x0 + 0.5 * mu * mu * s * s +
                              log_norm_cdf((x0 - mu * s * s) / s) -
                              log_norm_cdf(x0 / s);
            return std::exp(lg);
        }
        case DensityKind::Tabulated: {
            std::vector<double> y(d.values().size());
            for (std::size_t i = 0; i < y.size(); ++i)
                y[i] = std::exp(-mu * d.grid()[i]) * d.values()[i];
            return quad::composite_simpson(d.grid(), y);
        }
    }
    return 0.0;
}

double mean(const Density& d) {
    const double r = d.rate();
    switch (d.kind()) {
        case DensityKind::Exponential:
            return 1.0 / r;
        case DensityKind::GammaShape2:
            return 2.0 / r;
        case DensityKind::NarrowGaussian: {
            const double x0 = d.center(), s = d.sigma();
            const double a = x0 / s;
            return x0 + s * norm_pdf(a) / norm_cdf(a);
        }
        case DensityKind::Tabulated: {
            // tail inspection: x * d(x) must have decayed by the grid end,
            // otherwise the first moment cannot be trusted from finite data
            const auto& g = d.grid();
            const auto& v = d.values();
            const std::size_t n = g.size();
            std::vector<double> y(n);
            double peak = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                y[i] = g[i] * v[i];
                peak = std::max(peak, y[i]);
            }
            if (y.back() > 0.05 * peak && y.back() > 1e-12)
                throw UnboundedMomentError(
                    "mean: x*d(x) has not decayed by the end of the tabulated grid");
            return quad::composite_simpson(g, y);
        }
    }
    return 0.0;
}

double partial_deficit(const Density& d, double alpha, double x) {
    if (x < 0.0) throw DomainError("partial_deficit: x must be >= 0");
    return x - alpha * d.cdf(x);
}

} // namespace mckv
