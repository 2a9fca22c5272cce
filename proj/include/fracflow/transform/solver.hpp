#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fracflow/errors.hpp"
#include "fracflow/kernels/params.hpp"
#include "fracflow/special/frac_calc.hpp"
#include "fracflow/special/gamma.hpp"
#include "fracflow/special/mittag_leffler.hpp"
#include "fracflow/tolerance.hpp"
#include "fracflow/transform/grid.hpp"

namespace fracflow::transform {

// Forcing sampled on a shared grid at strictly increasing times starting at
// zero; the solver treats it as piecewise linear in t between samples.  The
// optional decay_exponent records the gamma of an L1-decay law
// ||f(t)||_1 ~ (1+t)^{-gamma} when the caller knows one; the solver itself
// never uses it.
struct ForcingSchedule {
    std::vector<double> times;
    std::vector<Field> samples;
    double decay_exponent = std::numeric_limits<double>::quiet_NaN();

    void validate(const SpectralGrid& grid) const {
        if (times.size() != samples.size() || times.size() < 2)
            throw std::invalid_argument(
                "ForcingSchedule: need matching times/samples, at least two");
        if (times.front() != 0.0)
            throw std::invalid_argument("ForcingSchedule: times must start at 0");
        for (std::size_t i = 0; i + 1 < times.size(); ++i)
            if (!(times[i] < times[i + 1]))
                throw std::invalid_argument(
                    "ForcingSchedule: times must be strictly increasing");
        for (const auto& s : samples) {
            s.validate();
            if (!(s.grid == grid))
                throw std::invalid_argument(
                    "ForcingSchedule: sample grid differs from solution grid");
        }
    }
};

struct SolveOptions {
    ToleranceConfig tol{};             // Mittag-Leffler evaluation control
    bool check_resolution = true;      // spectral tail gate on the solution
    double resolved_fraction = 1e-2;   // max top-octave share of spectral energy
    double refinement_tol = 1e-3;      // forcing-schedule coarsening probe
};

namespace detail {

// The box must be wide enough that the mode spacing pi/L resolves the
// spectral width t^{-alpha/beta} of the propagator at the latest time.
inline void check_box(const SpectralGrid& g, const kernels::FracParams& prm,
                      double t_max) {
    const double need = M_PI * std::pow(t_max, prm.alpha / prm.beta);
    if (g.half_width < need)
        throw GridTooCoarse("spectral solve: half_width " +
                            std::to_string(g.half_width) +
                            " cannot resolve the kernel at t = " +
                            std::to_string(t_max) + " (need >= " +
                            std::to_string(need) + ")");
}

// Fraction of non-constant spectral energy sitting in the top octave
// (per-axis |k~| > n/4).  A solution with a heavy top octave is aliased, so
// its samples cannot be trusted.
inline void check_resolved(const SpectralGrid& g,
                           const std::vector<std::complex<double>>& hat,
                           double max_fraction, double t) {
    double tail = 0.0, total = 0.0;
    for (std::size_t k = 0; k < hat.size(); ++k) {
        const int kx = g.d == 1 ? static_cast<int>(k) : static_cast<int>(k) / g.n;
        const int ky = g.d == 1 ? 0 : static_cast<int>(k) % g.n;
        const int mx = std::abs(g.signed_index(kx));
        const int my = std::abs(g.signed_index(ky));
        const double e = std::norm(hat[k]);
        if (mx == 0 && my == 0) continue;
        total += e;
        if (std::max(mx, my) > g.n / 4) tail += e;
    }
    if (total > 0.0 && tail > max_fraction * total)
        throw GridTooCoarse("spectral solve: " + std::to_string(tail / total) +
                            " of the spectral energy at t = " + std::to_string(t) +
                            " sits in the top octave; refine the grid");
}

inline void check_times(const std::vector<double>& times) {
    if (times.empty())
        throw std::invalid_argument("spectral solve: empty time list");
    double prev = 0.0;
    for (double t : times) {
        if (!(t > prev))
            throw std::invalid_argument(
                "spectral solve: times must be strictly positive and increasing");
        prev = t;
    }
}

// E_{a,a+1}(-y) - E_{a,a+2}(-y) for y >= 0.  The two terms share their
// leading 1/y asymptotics, so the direct difference loses one factor of y in
// precision; past y = 50 the difference is summed from its own asymptotic
// series (the k = 1 term cancels identically).
inline double ml_generator_diff(double alpha, double y,
                                const ToleranceConfig& tol) {
    if (y <= 50.0)
        return special::mittag_leffler(alpha, alpha + 1.0, -y, tol) -
               special::mittag_leffler(alpha, alpha + 2.0, -y, tol);
    double acc = 0.0, prev_mag = std::numeric_limits<double>::infinity();
    for (int k = 2; k <= 60; ++k) {
        const double dr = special::reciprocal_gamma(alpha + 1.0 - alpha * k, 1e-12) -
                          special::reciprocal_gamma(alpha + 2.0 - alpha * k, 1e-12);
        const double term = ((k & 1) ? 1.0 : -1.0) * std::pow(y, -k) * dr;
        const double mag = std::abs(term);
        if (mag >= prev_mag) break;  // asymptotic series turned
        acc += term;
        if (mag <= 1e-18 * std::abs(acc)) break;
        prev_mag = mag;
    }
    return acc;
}

// Antiderivative pair for the per-mode memory kernel
// tau^{alpha-1} E_{alpha,alpha}(-lambda tau^alpha):
//   F(tau) = integral over (0, tau)  of that kernel,
//   G(tau) = integral over (0, tau)  of tau * kernel.
// Both are exact Mittag-Leffler identities, so piecewise-linear forcing is
// integrated without any quadrature error.
struct MemoryAntiderivatives {
    double f = 0.0;
    double g = 0.0;
};

inline MemoryAntiderivatives memory_antiderivatives(double alpha, double lambda,
                                                    double tau,
                                                    const ToleranceConfig& tol) {
    if (tau == 0.0) return {};
    const double y = lambda * std::pow(tau, alpha);
    MemoryAntiderivatives a;
    a.f = std::pow(tau, alpha) *
          special::mittag_leffler(alpha, alpha + 1.0, -y, tol);
    a.g = std::pow(tau, alpha + 1.0) * ml_generator_diff(alpha, y, tol);
    return a;
}

}  // namespace detail

// Evolve initial data with no forcing: per mode,
// hat_u(t) = E_{alpha,1}(-|xi|^beta t^alpha) hat_u0, inverse-transformed.
inline std::vector<Field> solve_homogeneous(const kernels::FracParams& prm,
                                            const Field& u0,
                                            const std::vector<double>& times,
                                            const SolveOptions& opt = {}) {
    prm.validate();
    u0.validate();
    if (u0.grid.d != prm.d)
        throw std::invalid_argument("solve_homogeneous: grid and parameter d differ");
    detail::check_times(times);
    detail::check_box(u0.grid, prm, times.back());

    const auto& g = u0.grid;
    const auto hat0 = to_hat(u0);
    std::vector<std::complex<double>> hat(hat0.size());
    std::vector<Field> out;
    out.reserve(times.size());
    for (double t : times) {
        const double ta = std::pow(t, prm.alpha);
        if (g.d == 1) {
            // lambda depends only on |k~|, so each factor serves k and n-k.
            for (int k = 0; k <= g.n / 2; ++k) {
                const double xi = std::abs(g.frequency(k));
                const double e = special::mittag_leffler(
                    prm.alpha, 1.0, -std::pow(xi, prm.beta) * ta, opt.tol);
                hat[k] = hat0[k] * e;
                if (k > 0 && k < g.n / 2) hat[g.n - k] = hat0[g.n - k] * e;
            }
        } else {
            for (std::size_t k = 0; k < hat.size(); ++k) {
                const double xi = std::sqrt(g.frequency_sq(k));
                hat[k] = hat0[k] * special::mittag_leffler(
                                       prm.alpha, 1.0,
                                       -std::pow(xi, prm.beta) * ta, opt.tol);
            }
        }
        if (opt.check_resolution)
            detail::check_resolved(g, hat, opt.resolved_fraction, t);
        out.push_back(from_hat(g, hat, t));
    }
    return out;
}

namespace detail {

// Spectral coefficients of every forcing sample, plus linear interpolation.
struct ForcingHats {
    std::vector<double> times;
    std::vector<std::vector<std::complex<double>>> hats;

    std::complex<double> at(double t, std::size_t mode) const {
        if (t <= times.front()) return hats.front()[mode];
        if (t >= times.back()) return hats.back()[mode];
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
        const double w = (t - times[i]) / (times[i + 1] - times[i]);
        return (1.0 - w) * hats[i][mode] + w * hats[i + 1][mode];
    }
};

inline ForcingHats forcing_hats(const ForcingSchedule& f) {
    ForcingHats fh;
    fh.times = f.times;
    fh.hats.reserve(f.samples.size());
    for (const auto& s : f.samples) fh.hats.push_back(to_hat(s));
    return fh;
}

// Antiderivative values at every knot clipped to [0, t].  The table depends
// on lambda and t only, so for symmetric spectra it serves several modes.
inline std::vector<MemoryAntiderivatives> memory_table(
    double alpha, double lambda, double t, const std::vector<double>& knots,
    const ToleranceConfig& tol) {
    std::vector<MemoryAntiderivatives> table(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (knots[i] >= t) break;  // tau = 0 from here on: {0, 0}
        table[i] = memory_antiderivatives(alpha, lambda, t - knots[i], tol);
    }
    return table;
}

// Duhamel update for one mode: initial relaxation plus the exact integral of
// the memory kernel against the piecewise-linear spectral forcing.
inline std::complex<double> forced_mode_from_table(
    double t, std::complex<double> u0hat, double relax, const ForcingHats& fh,
    std::size_t mode, const std::vector<MemoryAntiderivatives>& table) {
    std::complex<double> acc = u0hat * relax;
    for (std::size_t i = 0; i + 1 < fh.times.size(); ++i) {
        const double s0 = fh.times[i];
        if (s0 >= t) break;
        const auto f0 = fh.hats[i][mode];
        const auto slope =
            (fh.hats[i + 1][mode] - f0) / (fh.times[i + 1] - s0);
        acc += (f0 + slope * (t - s0)) * (table[i].f - table[i + 1].f) -
               slope * (table[i].g - table[i + 1].g);
    }
    return acc;
}

inline std::complex<double> forced_mode(double alpha, double lambda, double t,
                                        std::complex<double> u0hat,
                                        const ForcingHats& fh, std::size_t mode,
                                        const ToleranceConfig& tol) {
    const double relax =
        special::mittag_leffler(alpha, 1.0, -lambda * std::pow(t, alpha), tol);
    return forced_mode_from_table(t, u0hat, relax, fh, mode,
                                  memory_table(alpha, lambda, t, fh.times, tol));
}

}  // namespace detail

// Evolve initial data under sampled forcing via the per-mode Duhamel
// formula.  The (t-s)^{alpha-1} memory kernel is integrated exactly against
// the piecewise-linear interpolant of the forcing samples, so the only
// discretization error is the interpolation of f itself.  When the schedule
// has at least five samples, the result at the final time is re-computed on
// a probe set of modes with every other sample dropped; a relative shift
// beyond refinement_tol means the sampling is too coarse for the requested
// accuracy.
inline std::vector<Field> solve_forced(const kernels::FracParams& prm,
                                       const Field& u0,
                                       const ForcingSchedule& f,
                                       const std::vector<double>& times,
                                       const SolveOptions& opt = {}) {
    prm.validate();
    u0.validate();
    if (u0.grid.d != prm.d)
        throw std::invalid_argument("solve_forced: grid and parameter d differ");
    detail::check_times(times);
    f.validate(u0.grid);
    if (times.back() > f.times.back())
        throw std::invalid_argument(
            "solve_forced: forcing schedule does not cover the requested times");
    detail::check_box(u0.grid, prm, times.back());

    const auto& g = u0.grid;
    const auto hat0 = to_hat(u0);
    const auto fh = detail::forcing_hats(f);
    std::vector<std::complex<double>> hat(hat0.size());
    std::vector<Field> out;
    out.reserve(times.size());
    for (double t : times) {
        if (g.d == 1) {
            // Mirrored modes share lambda, hence the whole knot table.
            for (int k = 0; k <= g.n / 2; ++k) {
                const double lambda =
                    std::pow(std::abs(g.frequency(k)), prm.beta);
                const double relax = special::mittag_leffler(
                    prm.alpha, 1.0, -lambda * std::pow(t, prm.alpha), opt.tol);
                const auto table =
                    detail::memory_table(prm.alpha, lambda, t, fh.times, opt.tol);
                hat[k] = detail::forced_mode_from_table(t, hat0[k], relax, fh,
                                                        k, table);
                if (k > 0 && k < g.n / 2)
                    hat[g.n - k] = detail::forced_mode_from_table(
                        t, hat0[g.n - k], relax, fh, g.n - k, table);
            }
        } else {
            for (std::size_t k = 0; k < hat.size(); ++k) {
                const double lambda =
                    std::pow(std::sqrt(g.frequency_sq(k)), prm.beta);
                hat[k] = detail::forced_mode(prm.alpha, lambda, t, hat0[k], fh,
                                             k, opt.tol);
            }
        }
        if (opt.check_resolution)
            detail::check_resolved(g, hat, opt.resolved_fraction, t);
        out.push_back(from_hat(g, hat, t));
    }

    if (f.samples.size() >= 5) {
        // Coarsened-schedule probe on a sparse set of modes.
        detail::ForcingHats coarse;
        for (std::size_t i = 0; i < fh.times.size(); i += 2) {
            coarse.times.push_back(fh.times[i]);
            coarse.hats.push_back(fh.hats[i]);
        }
        if (coarse.times.back() != fh.times.back()) {
            coarse.times.push_back(fh.times.back());
            coarse.hats.push_back(fh.hats.back());
        }
        const double t = times.back();
        for (int m = 1; m <= g.n / 4; m *= 2) {
            const std::size_t k = g.d == 1 ? static_cast<std::size_t>(m)
                                           : static_cast<std::size_t>(m) * g.n;
            const double lambda = std::pow(std::sqrt(g.frequency_sq(k)), prm.beta);
            const auto fine =
                detail::forced_mode(prm.alpha, lambda, t, hat0[k], fh, k, opt.tol);
            const auto probe = detail::forced_mode(prm.alpha, lambda, t, hat0[k],
                                                   coarse, k, opt.tol);
            const double scale =
                std::max({std::abs(fine), std::abs(hat0[k]), 1e-14});
            if (std::abs(fine - probe) > opt.refinement_tol * scale)
                throw QuadratureUnderResolved(
                    "solve_forced: halving the forcing sample rate moves mode " +
                    std::to_string(m) + " by " +
                    std::to_string(std::abs(fine - probe) / scale) +
                    " relative; sample the forcing more densely");
        }
    }
    return out;
}

// Discrete residual of the evolution law: for every mode below the Nyquist
// half-band, apply the Grunwald-Letnikov form of the memory derivative to
// hat_u(t_n) - hat_u(0), add |xi|^beta hat_u(t_n) and subtract the forcing
// coefficient.  The snapshots must start at t = 0 and be uniformly spaced.
// The sup is taken over the second half of the time window, where the
// discrete memory sum has settled; its decay under dt-halving (first order)
// is the acceptance check for the solver.
inline double residual(const kernels::FracParams& prm,
                       const std::vector<Field>& solution,
                       const ForcingSchedule* f = nullptr) {
    prm.validate();
    if (solution.size() < 8)
        throw std::invalid_argument("residual: need at least 8 snapshots");
    for (const auto& s : solution) s.validate();
    const auto& g = solution.front().grid;
    if (g.d != prm.d)
        throw std::invalid_argument("residual: grid and parameter d differ");
    if (solution.front().time != 0.0)
        throw std::invalid_argument("residual: first snapshot must be at t = 0");
    const std::size_t m = solution.size() - 1;
    const double dt = solution[1].time - solution[0].time;
    for (std::size_t i = 0; i <= m; ++i) {
        if (!(solution[i].grid == g))
            throw std::invalid_argument("residual: snapshots on different grids");
        if (std::abs(solution[i].time - static_cast<double>(i) * dt) >
            1e-9 * std::max(1.0, solution.back().time))
            throw std::invalid_argument("residual: snapshots not uniformly spaced");
    }
    if (f) f->validate(g);

    // Keep only modes with per-axis |k~| <= n/4.
    std::vector<std::size_t> kept;
    std::vector<double> lambda;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const int kx = g.d == 1 ? static_cast<int>(k) : static_cast<int>(k) / g.n;
        const int ky = g.d == 1 ? 0 : static_cast<int>(k) % g.n;
        if (std::abs(g.signed_index(kx)) > g.n / 4 ||
            std::abs(g.signed_index(ky)) > g.n / 4)
            continue;
        kept.push_back(k);
        lambda.push_back(std::pow(std::sqrt(g.frequency_sq(k)), prm.beta));
    }

    std::vector<std::vector<std::complex<double>>> hats(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const auto full = to_hat(solution[i]);
        hats[i].reserve(kept.size());
        for (std::size_t k : kept) hats[i].push_back(full[k]);
    }
    detail::ForcingHats fh;
    if (f) {
        fh.times = f->times;
        for (const auto& s : f->samples) {
            const auto full = to_hat(s);
            auto& row = fh.hats.emplace_back();
            row.reserve(kept.size());
            for (std::size_t k : kept) row.push_back(full[k]);
        }
    }

    const auto w = special::gl_weights(prm.alpha, m + 1);
    const double scale = std::pow(dt, -prm.alpha);
    double sup = 0.0;
    for (std::size_t j = 0; j < kept.size(); ++j) {
        for (std::size_t n = (m + 1) / 2; n <= m; ++n) {
            std::complex<double> mem(0.0, 0.0);
            for (std::size_t i = 0; i <= n; ++i)
                mem += w[i] * (hats[n - i][j] - hats[0][j]);
            std::complex<double> res = scale * mem + lambda[j] * hats[n][j];
            if (f) res -= fh.at(static_cast<double>(n) * dt, j);
            sup = std::max(sup, std::abs(res));
        }
    }
    return sup;
}

}  // namespace fracflow::transform
