#pragma once

#include <cstddef>
#include <vector>

#include "mckv/errors.hpp"

namespace mckv {

/// A strictly increasing time grid with one real value per time.
struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }

    void push(double t, double v) {
        if (!times.empty() && t <= times.back())
            throw ConfigError("TimeSeries: times must be strictly increasing");
        times.push_back(t);
        values.push_back(v);
    }

    /// Linear interpolation; clamps outside the recorded window.
    double interp(double t) const;

    double front_time() const { return times.front(); }
    double back_time() const { return times.back(); }
};

/// Least-squares fit values ~ a + b*times. Returns {a, b}.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double max_abs_residual = 0.0;
};
LinearFit linear_fit(const TimeSeries& ts);
LinearFit linear_fit_window(const TimeSeries& ts, double t_lo, double t_hi);

} // namespace mckv
