#include "mckv/timeseries.hpp"

#include <algorithm>
#include <cmath>

namespace mckv {

double TimeSeries::interp(double t) const {
    if (times.empty()) throw ConfigError("TimeSeries::interp on empty series");
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    double t0 = times[i - 1], t1 = times[i];
    double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * values[i - 1] + w * values[i];
}

LinearFit linear_fit_window(const TimeSeries& ts, double t_lo, double t_hi) {
    double st = 0, sv = 0, stt = 0, stv = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double t = ts.times[i];
        if (t < t_lo || t > t_hi) continue;
        st += t;
        sv += ts.values[i];
        stt += t * t;
        stv += t * ts.values[i];
        ++n;
    }
    if (n < 2) throw ConfigError("linear_fit: fewer than two samples in window");
    double nd = static_cast<double>(n);
    double denom = nd * stt - st * st;
    LinearFit fit;
    fit.slope = (denom != 0.0) ? (nd * stv - st * sv) / denom : 0.0;
    fit.intercept = (sv - fit.slope * st) / nd;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double t = ts.times[i];
        if (t < t_lo || t > t_hi) continue;
        double r = std::abs(ts.values[i] - (fit.intercept + fit.slope * t));
        fit.max_abs_residual = std::max(fit.max_abs_residual, r);
    }
    return fit;
}

LinearFit linear_fit(const TimeSeries& ts) {
    if (ts.empty()) throw ConfigError("linear_fit on empty series");
    return linear_fit_window(ts, ts.times.front(), ts.times.back());
}

} // namespace mckv
