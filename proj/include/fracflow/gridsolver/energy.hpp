#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fracflow/decay/norms.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/special/frac_calc.hpp"
#include "fracflow/special/gamma.hpp"
#include "fracflow/transform/grid.hpp"

namespace fracflow::gridsolver {

namespace detail {

inline fracflow::decay::NormSeries norm_series(
    const std::vector<transform::Field>& states, double p) {
    if (states.empty())
        throw std::invalid_argument("norm series: no states supplied");
    fracflow::decay::NormSeries out;
    out.p = p;
    out.weak = false;
    out.times.reserve(states.size());
    out.values.reserve(states.size());
    for (const auto& s : states) {
        if (!(s.grid == states.front().grid))
            throw std::invalid_argument("norm series: mixed grids");
        out.times.push_back(s.time);
        out.values.push_back(fracflow::decay::lp_norm(s, p));
    }
    out.validate();
    return out;
}

inline void require_uniform_from_zero(const std::vector<double>& t) {
    if (t.size() < 2 || t.front() != 0.0)
        throw std::invalid_argument("time grid must start at 0");
    const double dt = t[1] - t[0];
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        if (std::abs((t[i + 1] - t[i]) - dt) > 1e-9 * dt)
            throw std::invalid_argument("time grid must be uniform");
}

}  // namespace detail

inline fracflow::decay::NormSeries energy_series(
    const std::vector<transform::Field>& states) {
    return detail::norm_series(states, 2.0);
}

inline fracflow::decay::NormSeries l1_series(
    const std::vector<transform::Field>& states) {
    return detail::norm_series(states, 1.0);
}

// Result of testing the discrete differential inequality
//   d_t^alpha (n(t) - n(0)) + mu n(t)^gamma <= 0
// against an energy series.  mu is fitted from the data (the best constant the
// series actually supports, taken as a low percentile of the step-wise ratios
// so isolated transients do not zero it out) and reported rather than assumed.
struct EnergyReport {
    double mu = 0.0;            // fitted dissipation constant (low percentile)
    double mu_supported = 0.0;  // largest constant supported at every step
    double gamma = 0.0;         // nonlinearity exponent used
    double satisfied_fraction = 0;  // fraction of steps with nonnegative slack
    std::size_t steps = 0;
};

// gamma = 1 + 2 beta / d is the exponent the interpolation argument produces
// for L2 energies controlled by the L1 mass.
inline EnergyReport energy_inequality_check(
    const fracflow::decay::NormSeries& series, double alpha, double beta,
    int d = 1) {
    series.validate();
    if (series.p != 2.0)
        throw std::invalid_argument("energy_inequality_check: expects an L2 series");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("energy_inequality_check: alpha outside (0, 1]");
    if (!(beta > 0.0) || d < 1)
        throw std::invalid_argument("energy_inequality_check: bad beta or d");
    if (series.times.size() < 8)
        throw std::invalid_argument(
            "energy_inequality_check: need at least 8 samples");
    detail::require_uniform_from_zero(series.times);

    const double gamma = 1.0 + 2.0 * beta / static_cast<double>(d);
    const double dt = series.times[1] - series.times[0];
    const double dt_pow = std::pow(dt, -alpha);
    const std::size_t m = series.times.size() - 1;
    const auto w = special::gl_weights(alpha, m + 1);

    EnergyReport rep;
    rep.gamma = gamma;
    rep.steps = m;

    const double n0 = series.values.front();
    std::vector<double> deriv(m);  // memory derivative of n - n0 at each step
    for (std::size_t k = 1; k <= m; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= k; ++j)
            acc += w[j] * (series.values[k - j] - n0);
        deriv[k - 1] = dt_pow * acc;
    }

    // Step-wise supportable constants -D_k / n_k^gamma.
    std::vector<double> ratios;
    ratios.reserve(m);
    const double dead = 1e-30 * std::max(n0, 1.0);
    for (std::size_t k = 1; k <= m; ++k) {
        const double nk = series.values[k];
        if (nk > dead) ratios.push_back(-deriv[k - 1] / std::pow(nk, gamma));
    }
    if (ratios.empty()) {
        // Dead series: the inequality holds vacuously.
        rep.mu = 0.0;
        rep.satisfied_fraction = 1.0;
        return rep;
    }

    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t idx =
        static_cast<std::size_t>(0.05 * static_cast<double>(sorted.size()));
    rep.mu = std::max(0.0, sorted[idx]);
    // The comparison principle needs a constant every step supports; anything
    // larger makes the majorizing problem decay faster than the data early on.
    rep.mu_supported = std::max(0.0, sorted.front());

    std::size_t good = 0;
    const double slack = 1e-10 * std::max(1.0, std::abs(deriv[0]));
    for (std::size_t k = 1; k <= m; ++k) {
        const double nk = series.values[k];
        if (deriv[k - 1] + rep.mu * std::pow(nk, gamma) <= slack) ++good;
    }
    rep.satisfied_fraction = static_cast<double>(good) / static_cast<double>(m);
    return rep;
}

// Scalar comparison problem w(t) = w0 - mu J^alpha [w^gamma](t), solved by
// product integration: w^gamma is interpolated linearly on the uniform grid
// and the weakly singular integrals are taken exactly.  Each step is a scalar
// implicit equation in w_n, solved by safeguarded Newton.
//
// The continuum solution is positive and nonincreasing.  The discrete one
// matches once mu dt^alpha w0^{gamma-1} is small; a coarse first cell cannot
// represent the infinite initial slope and may ring for a step or two (or,
// in extreme cases, push the root negative, reported as RootFindFailure).
// Callers comparing against data sampled on a coarse grid should solve here
// on a refined grid and subsample.
inline std::vector<double> solve_comparison_ode(double alpha, double mu,
                                                double gamma, double w0,
                                                const std::vector<double>& t_grid) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("solve_comparison_ode: alpha outside (0, 1]");
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw std::invalid_argument("solve_comparison_ode: mu must be >= 0");
    if (!(gamma > 1.0))
        throw std::invalid_argument("solve_comparison_ode: gamma must exceed 1");
    if (!(w0 > 0.0))
        throw std::invalid_argument("solve_comparison_ode: w0 must be positive");
    detail::require_uniform_from_zero(t_grid);

    const std::size_t m = t_grid.size() - 1;
    std::vector<double> w(m + 1, w0);
    if (mu == 0.0) return w;

    const double dt = t_grid[1] - t_grid[0];
    const double inv_gamma_a = special::reciprocal_gamma(alpha);
    // Coefficient of the unknown w_n^gamma in mu J^alpha: the last interval's
    // exact hat-function integral, dt^alpha / Gamma(alpha + 2).
    const double c_self = std::pow(dt, alpha) * special::reciprocal_gamma(alpha) /
                          (alpha * (alpha + 1.0));

    std::vector<double> g(m + 1);  // w^gamma history
    g[0] = std::pow(w0, gamma);

    for (std::size_t n = 1; n <= m; ++n) {
        // Known part of J^alpha [w^gamma](t_n): all intervals but the last
        // plus the t_{n-1} endpoint of the last one.
        const double tn = t_grid[n];
        double known = 0.0;
        for (std::size_t i = 0; i + 1 <= n; ++i) {
            const double tau_lo = tn - t_grid[i + 1];
            const double tau_hi = tn - t_grid[i];
            const double a =
                (std::pow(tau_hi, alpha) - std::pow(tau_lo, alpha)) / alpha;
            const double b = (std::pow(tau_hi, alpha + 1.0) -
                              std::pow(tau_lo, alpha + 1.0)) /
                             (alpha + 1.0);
            // lhs endpoint weight (b - tau_lo a)/dt, rhs (tau_hi a - b)/dt
            if (i + 1 == n)
                known += g[i] * (b - tau_lo * a) / dt;
            else
                known += (g[i] * (b - tau_lo * a) + g[i + 1] * (tau_hi * a - b)) / dt;
        }
        known *= inv_gamma_a;

        // Solve x - w0 + mu (known + c_self x^gamma) = 0 on [0, bracket_hi].
        const auto f = [&](double x) {
            return x - w0 + mu * (known + c_self * std::pow(x, gamma));
        };
        double lo = 0.0, hi = w[n - 1];
        double flo = f(lo);
        if (flo > 0.0)
            throw RootFindFailure(
                "solve_comparison_ode: no positive root (step too stiff)");
        double fhi = f(hi);
        std::size_t expand = 0;
        while (fhi < 0.0) {
            // Discrete solution wants to exceed the previous value; widen a
            // little before giving up.
            hi *= 2.0;
            fhi = f(hi);
            if (++expand > 60 || !std::isfinite(fhi))
                throw RootFindFailure(
                    "solve_comparison_ode: failed to bracket the root");
        }

        double x = std::min(hi, std::max(1e-300, w[n - 1] * 0.9 + 0.1 * lo));
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            const double fx = f(x);
            if (fx > 0.0)
                hi = x;
            else
                lo = x;
            const double df =
                1.0 + mu * c_self * gamma * std::pow(x, gamma - 1.0);
            double x_new = x - fx / df;
            if (!(x_new > lo) || !(x_new < hi)) x_new = 0.5 * (lo + hi);
            if (std::abs(x_new - x) <= 1e-15 * std::max(1.0, std::abs(x_new))) {
                x = x_new;
                converged = true;
                break;
            }
            x = x_new;
        }
        if (!converged && std::abs(f(x)) > 1e-10 * std::max(1.0, w0))
            throw RootFindFailure("solve_comparison_ode: Newton stalled");
        w[n] = x;
        g[n] = std::pow(x, gamma);
    }
    return w;
}

}  // namespace fracflow::gridsolver
