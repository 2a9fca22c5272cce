#pragma once

// Discrete fractional calculus on uniformly sampled signals: the
// Grunwald-Letnikov weights, the Riemann-Liouville integral via
// piecewise-linear product integration, and the Riemann-Liouville /
// Caputo-style derivative via the Grunwald-Letnikov sum.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fracflow/special/gamma.hpp"

namespace fracflow::special {

// A signal sampled at t0, t0+dt, t0+2dt, ...
struct SampledSignal {
    std::vector<double> values;
    double dt = 1.0;
    double t0 = 0.0;

    void validate() const {
        if (values.size() < 2)
            throw std::invalid_argument("SampledSignal: need at least two samples");
        if (!(dt > 0.0))
            throw std::invalid_argument("SampledSignal: dt must be positive");
    }
};

// Grunwald-Letnikov binomial weights w_k = (-1)^k C(alpha, k), k = 0..n,
// via the stable ratio recurrence.  For alpha in (0,1): w_0 = 1, all later
// weights are negative, and every partial sum stays positive.
inline std::vector<double> gl_weights(double alpha, std::size_t n) {
    std::vector<double> w(n + 1);
    w[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k)
        w[k] = w[k - 1] * ((static_cast<double>(k) - 1.0 - alpha) / static_cast<double>(k));
    return w;
}

// Fractional integral of order alpha >= 0 starting at the first sample.
// Piecewise-linear product integration: exact for signals that are linear
// between nodes, second order for smooth ones.
inline SampledSignal rl_integral(const SampledSignal& f, double alpha) {
    f.validate();
    if (alpha < 0.0)
        throw std::invalid_argument("rl_integral: alpha must be nonnegative");
    if (alpha == 0.0)
        return f;

    const std::size_t n = f.values.size();
    // p1[m] = m^{alpha+1}; the interior weight for lag m is
    // p1[m+1] + p1[m-1] - 2 p1[m].
    std::vector<double> p1(n + 1);
    for (std::size_t m = 0; m <= n; ++m)
        p1[m] = std::pow(static_cast<double>(m), alpha + 1.0);
    std::vector<double> interior(n);
    for (std::size_t m = 1; m < n; ++m)
        interior[m] = p1[m + 1] + p1[m - 1] - 2.0 * p1[m];

    const double scale = std::pow(f.dt, alpha) / std::exp(log_gamma(alpha + 2.0));
    SampledSignal out;
    out.dt = f.dt;
    out.t0 = f.t0;
    out.values.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double di = static_cast<double>(i);
        // weight of the initial sample keeps the rule exact on constants
        double acc = (std::pow(di - 1.0, alpha + 1.0) -
                      (di - 1.0 - alpha) * std::pow(di, alpha)) *
                     f.values[0];
        for (std::size_t j = 1; j < i; ++j)
            acc += interior[i - j] * f.values[j];
        acc += f.values[i];
        out.values[i] = scale * acc;
    }
    return out;
}

// Fractional derivative of order alpha in [0,1] via the Grunwald-Letnikov
// sum with full memory.  First-order accurate; the workhorse for the
// time-stepping schemes, which use the same weights.
inline SampledSignal rl_derivative(const SampledSignal& f, double alpha) {
    f.validate();
    if (f.values.size() < 3)
        throw std::invalid_argument("rl_derivative: need at least three samples");
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("rl_derivative: alpha must lie in [0,1]");
    if (alpha == 0.0)
        return f;

    const std::size_t n = f.values.size();
    const auto w = gl_weights(alpha, n - 1);
    const double scale = std::pow(f.dt, -alpha);
    SampledSignal out;
    out.dt = f.dt;
    out.t0 = f.t0;
    out.values.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k <= i; ++k)
            acc += w[k] * f.values[i - k];
        out.values[i] = scale * acc;
    }
    return out;
}

} // namespace fracflow::special
