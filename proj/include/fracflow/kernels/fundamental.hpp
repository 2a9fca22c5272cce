#pragma once

#include <cmath>
#include <stdexcept>

#include "fracflow/errors.hpp"
#include "fracflow/foxh/eval.hpp"
#include "fracflow/foxh/spec.hpp"
#include "fracflow/kernels/params.hpp"
#include "fracflow/special/mittag_leffler.hpp"

// Radial evaluators for the two fundamental kernels of
//   d_t^alpha (u - u0) + (-Delta)^{beta/2} u = f,
// their gradients, and the time derivative of the Duhamel kernel.  Away from
// x = 0 everything reduces to one Mellin-Barnes profile evaluated at the
// self-similar argument z = 2^{-beta} t^{-alpha} r^beta; the origin is
// handled separately since the limit may be finite, zero, or divergent
// depending on how beta compares with d.

namespace fracflow::kernels {

// --- profile specs ---------------------------------------------------------
// All four profiles share the lower row [(d/2, beta/2), (1,1), (1, beta/2)]
// shape; the Duhamel variants shift the second upper entry (1,alpha) to
// (alpha,alpha), and the gradient variants shift d/2 to (d+2)/2.

inline foxh::FoxHSpec propagator_profile(const FracParams& prm) {
    prm.validate();
    foxh::FoxHSpec s;
    s.m = 2; s.n = 1; s.p = 2; s.q = 3;
    s.upper = {{1.0, 1.0}, {1.0, prm.alpha}};
    s.lower = {{0.5 * prm.d, 0.5 * prm.beta}, {1.0, 1.0}, {1.0, 0.5 * prm.beta}};
    return s;
}

inline foxh::FoxHSpec duhamel_profile(const FracParams& prm) {
    foxh::FoxHSpec s = propagator_profile(prm);
    s.upper[1] = {prm.alpha, prm.alpha};
    return s;
}

inline foxh::FoxHSpec propagator_gradient_profile(const FracParams& prm) {
    foxh::FoxHSpec s = propagator_profile(prm);
    s.lower[0] = {0.5 * (prm.d + 2), 0.5 * prm.beta};
    return s;
}

inline foxh::FoxHSpec duhamel_gradient_profile(const FracParams& prm) {
    foxh::FoxHSpec s = duhamel_profile(prm);
    s.lower[0] = {0.5 * (prm.d + 2), 0.5 * prm.beta};
    return s;
}

inline double scaling_argument(const FracParams& prm, double t, double r) {
    return std::pow(2.0, -prm.beta) * std::pow(t, -prm.alpha) * std::pow(r, prm.beta);
}

namespace detail {

inline void check_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("kernel evaluation: t must be positive and finite");
}

inline void check_radius(double r) {
    if (!(r >= 0.0) || !std::isfinite(r))
        throw std::invalid_argument("kernel evaluation: r must be >= 0 and finite");
}

// pi^{-d/2}
inline double pi_pow(int d) { return std::pow(M_PI, -0.5 * d); }

}  // namespace detail

// --- propagator Z ----------------------------------------------------------
// Z(t,x) = pi^{-d/2} r^{-d} H(z).  At r = 0 the profile's leading power
// z^{d/beta} exactly cancels r^{-d}, so the limit is the residue coefficient
// at s = -d/beta; it is finite only when no slower-decaying power family
// survives, i.e. for alpha = 1 (those families cancel structurally) or
// beta > d.

inline double z_kernel(const FracParams& prm, double t, double r,
                       const foxh::EvalPolicy& policy = {}) {
    prm.validate();
    detail::check_time(t);
    detail::check_radius(r);
    const double d = static_cast<double>(prm.d);
    if (r == 0.0) {
        if (!prm.heat_like() && !(prm.beta > d && !prm.close(prm.beta, d)))
            throw SingularAtOrigin(
                "z_kernel: unbounded at x = 0 for alpha < 1, beta <= d");
        const double g0 = foxh::leading_coefficient(propagator_profile(prm), -d / prm.beta);
        return detail::pi_pow(prm.d) * std::pow(2.0, -d) *
               std::pow(t, -prm.alpha * d / prm.beta) * g0;
    }
    const double z = scaling_argument(prm, t, r);
    return detail::pi_pow(prm.d) * std::pow(r, -d) *
           foxh::eval(propagator_profile(prm), z, policy);
}

// --- Duhamel kernel Y ------------------------------------------------------
// Y(t,x) = pi^{-d/2} t^{alpha-1} r^{-d} H(z) with the (alpha,alpha) profile.
// The z^1 power family is structurally absent, so the origin is milder than
// for Z: finite whenever alpha = 1 or d < 2 beta.

inline double y_kernel(const FracParams& prm, double t, double r,
                       const foxh::EvalPolicy& policy = {}) {
    prm.validate();
    detail::check_time(t);
    detail::check_radius(r);
    const double d = static_cast<double>(prm.d);
    if (r == 0.0) {
        if (!prm.heat_like() &&
            !(d < 2.0 * prm.beta && !prm.close(d, 2.0 * prm.beta)))
            throw SingularAtOrigin(
                "y_kernel: unbounded at x = 0 for alpha < 1, d >= 2 beta");
        const double g0 = foxh::leading_coefficient(duhamel_profile(prm), -d / prm.beta);
        return detail::pi_pow(prm.d) * std::pow(2.0, -d) *
               std::pow(t, prm.alpha - 1.0 - prm.alpha * d / prm.beta) * g0;
    }
    const double z = scaling_argument(prm, t, r);
    return detail::pi_pow(prm.d) * std::pow(t, prm.alpha - 1.0) * std::pow(r, -d) *
           foxh::eval(duhamel_profile(prm), z, policy);
}

// --- |grad Z| --------------------------------------------------------------
// |grad Z|(t,x) = 2 pi^{-d/2} r^{-d-1} |H(z)| with d/2 -> (d+2)/2 in the
// profile.  For alpha < 1 the kernel has a conical kink at the origin: the
// radial limit of |grad Z| is a nonzero constant when beta = d + 1 (only
// d = 1, beta = 2 within range) and diverges for beta < d + 1.  alpha = 1
// restores smoothness and the gradient vanishes at x = 0.

inline double z_gradient_norm(const FracParams& prm, double t, double r,
                              const foxh::EvalPolicy& policy = {}) {
    prm.validate();
    detail::check_time(t);
    detail::check_radius(r);
    const double d = static_cast<double>(prm.d);
    if (r == 0.0) {
        if (prm.heat_like()) return 0.0;
        if (prm.close(prm.beta, d + 1.0)) {
            const double g1 =
                foxh::leading_coefficient(propagator_gradient_profile(prm), -1.0);
            return 2.0 * detail::pi_pow(prm.d) * std::pow(2.0, -prm.beta) *
                   std::pow(t, -prm.alpha) * std::abs(g1);
        }
        throw SingularAtOrigin(
            "z_gradient_norm: unbounded at x = 0 for alpha < 1, beta < d + 1");
    }
    const double z = scaling_argument(prm, t, r);
    return 2.0 * detail::pi_pow(prm.d) * std::pow(r, -d - 1.0) *
           std::abs(foxh::eval(propagator_gradient_profile(prm), z, policy));
}

// --- |grad Y| --------------------------------------------------------------
// Same prefactor shape as |grad Z| with the extra t^{alpha-1}.  The z^1
// family is again structurally absent, so the surviving near-origin power is
// r^{2 beta - d - 1}: the limit is zero above the borderline 2 beta = d + 1,
// a constant on it, and divergent below.

inline double y_gradient_norm(const FracParams& prm, double t, double r,
                              const foxh::EvalPolicy& policy = {}) {
    prm.validate();
    detail::check_time(t);
    detail::check_radius(r);
    const double d = static_cast<double>(prm.d);
    if (r == 0.0) {
        if (prm.heat_like()) return 0.0;
        if (prm.close(2.0 * prm.beta, d + 1.0)) {
            const double g2 =
                foxh::leading_coefficient(duhamel_gradient_profile(prm), -2.0);
            const double zfac = std::pow(2.0, -prm.beta) * std::pow(t, -prm.alpha);
            return 2.0 * detail::pi_pow(prm.d) * std::pow(t, prm.alpha - 1.0) *
                   zfac * zfac * std::abs(g2);
        }
        if (2.0 * prm.beta > d + 1.0) return 0.0;
        throw SingularAtOrigin(
            "y_gradient_norm: unbounded at x = 0 for alpha < 1, 2 beta < d + 1");
    }
    const double z = scaling_argument(prm, t, r);
    return 2.0 * detail::pi_pow(prm.d) * std::pow(t, prm.alpha - 1.0) *
           std::pow(r, -d - 1.0) *
           std::abs(foxh::eval(duhamel_gradient_profile(prm), z, policy));
}

// --- d/dt Y ----------------------------------------------------------------
// Differentiating Y = pi^{-d/2} t^{alpha-1} r^{-d} H(z(t)) and using
// dz/dt = -alpha z / t gives
//   dY/dt = pi^{-d/2} t^{alpha-2} r^{-d} [ (alpha-1) H(z) - alpha z H'(z) ].
// At the origin Y is a pure power of t, so the derivative is just that
// exponent times Y/t (and inherits Y's finiteness condition).

inline double y_time_derivative(const FracParams& prm, double t, double r,
                                const foxh::EvalPolicy& policy = {}) {
    prm.validate();
    detail::check_time(t);
    detail::check_radius(r);
    const double d = static_cast<double>(prm.d);
    if (r == 0.0) {
        const double expo = prm.alpha - 1.0 - prm.alpha * d / prm.beta;
        return expo * y_kernel(prm, t, 0.0, policy) / t;
    }
    const double z = scaling_argument(prm, t, r);
    const foxh::HDeriv h = foxh::eval_deriv(duhamel_profile(prm), z, policy);
    return detail::pi_pow(prm.d) * std::pow(t, prm.alpha - 2.0) * std::pow(r, -d) *
           ((prm.alpha - 1.0) * h.value - prm.alpha * h.z_deriv);
}

// --- Fourier symbols -------------------------------------------------------
// With the unitary transform convention, each radial mode xi relaxes by a
// one-parameter Mittag-Leffler law:
//   Zhat(t,xi) = (2 pi)^{-d/2} E_{alpha,1}(-|xi|^beta t^alpha)
//   Yhat(t,xi) = (2 pi)^{-d/2} t^{alpha-1} E_{alpha,alpha}(-|xi|^beta t^alpha)

inline double z_hat(const FracParams& prm, double t, double xi,
                    const ToleranceConfig& tol = {}) {
    prm.validate();
    detail::check_time(t);
    if (!(xi >= 0.0) || !std::isfinite(xi))
        throw std::invalid_argument("z_hat: radial frequency must be >= 0");
    const double x = std::pow(xi, prm.beta) * std::pow(t, prm.alpha);
    return std::pow(2.0 * M_PI, -0.5 * prm.d) *
           special::mittag_leffler(prm.alpha, 1.0, -x, tol);
}

inline double y_hat(const FracParams& prm, double t, double xi,
                    const ToleranceConfig& tol = {}) {
    prm.validate();
    detail::check_time(t);
    if (!(xi >= 0.0) || !std::isfinite(xi))
        throw std::invalid_argument("y_hat: radial frequency must be >= 0");
    const double x = std::pow(xi, prm.beta) * std::pow(t, prm.alpha);
    return std::pow(2.0 * M_PI, -0.5 * prm.d) * std::pow(t, prm.alpha - 1.0) *
           special::mittag_leffler(prm.alpha, prm.alpha, -x, tol);
}

}  // namespace fracflow::kernels
