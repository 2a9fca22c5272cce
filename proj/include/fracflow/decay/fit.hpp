#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "fracflow/decay/norms.hpp"
#include "fracflow/errors.hpp"

namespace fracflow::decay {

// Power-law fit value ~ C * t^slope over a time window, obtained by least
// squares in log-log coordinates.  window_lo/window_hi record the extent of
// the data actually used, so they always lie inside the series range.
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;  // log C
    double r_squared = 1.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
};

// Fit the decay exponent of a norm series on [t_lo, t_hi].  Requires at
// least six samples inside the window, all with strictly positive times and
// values; anything less is a DegenerateWindow rather than a silent bad fit.
inline RateFit fit_rate(const NormSeries& series, double t_lo, double t_hi) {
    series.validate();
    if (!(t_lo < t_hi))
        throw std::invalid_argument("fit_rate: window must satisfy t_lo < t_hi");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    std::size_t m = 0;
    double seen_lo = 0.0, seen_hi = 0.0;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        if (t < t_lo || t > t_hi) continue;
        if (!(t > 0.0))
            throw DegenerateWindow("fit_rate: window contains t <= 0");
        if (!(series.values[i] > 0.0))
            throw DegenerateWindow("fit_rate: nonpositive value in window");
        const double x = std::log(t), y = std::log(series.values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        if (m == 0) seen_lo = t;
        seen_hi = t;
        ++m;
    }
    if (m < 6)
        throw DegenerateWindow("fit_rate: fewer than 6 samples in window");

    const double n = static_cast<double>(m);
    const double var_x = sxx - sx * sx / n;
    if (!(var_x > 0.0))
        throw DegenerateWindow("fit_rate: no spread in log t");

    RateFit fit;
    const double cov = sxy - sx * sy / n;
    fit.slope = cov / var_x;
    fit.intercept = (sy - fit.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    // Constant series fit a constant exactly; report that as a perfect fit.
    const double ss_res = std::max(0.0, ss_tot - cov * cov / var_x);
    fit.r_squared =
        ss_tot > 0.0 ? std::min(1.0, std::max(0.0, 1.0 - ss_res / ss_tot)) : 1.0;
    fit.window_lo = seen_lo;
    fit.window_hi = seen_hi;
    return fit;
}

}  // namespace fracflow::decay
