#pragma once

// Gamma-family primitives: sign-tracked real log-gamma, principal complex
// log-gamma, digamma, and a reciprocal gamma that is exactly zero at the
// poles.  Everything downstream (series coefficients, residues) is built
// on these, so they are kept deliberately boring and well tested.

#include <cmath>
#include <complex>
#include <numbers>

#include "fracflow/errors.hpp"

namespace fracflow::special {

// log|Gamma(x)| together with the sign of Gamma(x).
struct SignedLogGamma {
    double log_abs;
    int sign; // +1 or -1
};

inline bool is_nonpositive_integer(double x, double eps = 0.0) {
    return x <= 0.5 && std::abs(x - std::round(x)) <= eps && std::round(x) <= 0.0;
}

// Real log-gamma.  Relies on std::lgamma for the magnitude (it already
// returns log|Gamma|) and derives the sign from which interval between
// poles x falls into.
inline SignedLogGamma signed_log_gamma(double x) {
    if (is_nonpositive_integer(x))
        throw PoleAtNonpositiveInteger("gamma pole at x = " + std::to_string(x));
    if (x > 0.0)
        return {std::lgamma(x), +1};
    // Gamma alternates sign between consecutive nonpositive integers:
    // negative on (-1,0), positive on (-2,-1), and so on.
    const long long f = static_cast<long long>(std::floor(x));
    return {std::lgamma(x), (f % 2 != 0) ? -1 : +1};
}

// 1/Gamma(x) as an entire function: exactly +0.0 at the poles of Gamma.
// integer_snap widens the pole detection, which matters when x is built
// from floating-point arithmetic like beta - alpha*k and an exact integer
// lands a few ulp off.
inline double reciprocal_gamma(double x, double integer_snap = 0.0) {
    if (is_nonpositive_integer(x, integer_snap))
        return 0.0;
    const auto [lg, sign] = signed_log_gamma(x);
    if (lg > 700.0) // |Gamma| overflows, reciprocal underflows cleanly
        return 0.0;
    return sign * std::exp(-lg);
}

namespace detail {

// sin(pi*x) with the argument reduced first, so accuracy holds near the
// integers where the naive product pi*x loses digits.
inline double sin_pi(double x) {
    const double m = std::round(x);
    const double r = x - m;
    const double s = std::sin(std::numbers::pi * r);
    return (static_cast<long long>(m) % 2 != 0) ? -s : s;
}

inline double tan_pi(double x) {
    const double r = x - std::round(x);
    return std::tan(std::numbers::pi * r);
}

// Analytic logarithm of sin(pi*z) away from the real axis, chosen so that
// log_gamma built on it agrees with the continuation from the positive
// real axis.  On the axis it falls back to the principal value.
inline std::complex<double> log_sin_pi(std::complex<double> z) {
    using namespace std::complex_literals;
    const double pi = std::numbers::pi;
    if (z.imag() > 0.0) {
        // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}), |e^{2 i pi z}| < 1
        const std::complex<double> q = std::exp(2.0i * pi * z);
        return std::complex<double>(-std::log(2.0), pi / 2.0) - 1.0i * pi * z +
               std::log(1.0 - q);
    }
    if (z.imag() < 0.0)
        return std::conj(log_sin_pi(std::conj(z)));
    const double s = sin_pi(z.real());
    return {std::log(std::abs(s)), s < 0.0 ? pi : 0.0};
}

// Lanczos approximation, g = 7, 9 terms.  Good to ~1e-14 relative on
// Re z >= 0.5.
inline constexpr double lanczos_g = 7.0;
inline constexpr double lanczos_coef[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

inline std::complex<double> log_gamma_lanczos(std::complex<double> z) {
    // valid for Re z >= 0.5
    const std::complex<double> w = z - 1.0;
    std::complex<double> a = lanczos_coef[0];
    for (int i = 1; i < 9; ++i)
        a += lanczos_coef[i] / (w + static_cast<double>(i));
    const std::complex<double> t = w + lanczos_g + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (w + 0.5) * std::log(t) - t +
           std::log(a);
}

} // namespace detail

// Principal-branch complex log-gamma (continuation from the positive real
// axis; imaginary part is not reduced mod 2*pi).
inline std::complex<double> log_gamma(std::complex<double> z) {
    if (z.imag() == 0.0) {
        const double x = z.real();
        const auto [lg, sign] = signed_log_gamma(x); // throws on poles
        return {lg, sign < 0 ? std::numbers::pi : 0.0};
    }
    if (z.real() >= 0.5)
        return detail::log_gamma_lanczos(z);
    // Reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1-z).
    return std::log(std::numbers::pi) - detail::log_sin_pi(z) -
           detail::log_gamma_lanczos(1.0 - z);
}

inline double log_gamma(double x) {
    const auto [lg, sign] = signed_log_gamma(x);
    if (sign < 0)
        throw PoleAtNonpositiveInteger(
            "log_gamma(real): Gamma(" + std::to_string(x) + ") is negative");
    return lg;
}

// Digamma via upward recurrence into x >= 12 and the Stirling-type tail;
// negative arguments go through the reflection formula.
inline double digamma(double x) {
    if (is_nonpositive_integer(x))
        throw PoleAtNonpositiveInteger("digamma pole at x = " + std::to_string(x));
    if (x < 0.5)
        return digamma(1.0 - x) - std::numbers::pi / detail::tan_pi(x);
    double acc = 0.0;
    while (x < 12.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double u = 1.0 / (x * x);
    // psi(x) ~ ln x - 1/(2x) - sum B_{2n} / (2n x^{2n})
    const double tail =
        u * (1.0 / 12.0 +
             u * (-1.0 / 120.0 +
                  u * (1.0 / 252.0 +
                       u * (-1.0 / 240.0 +
                            u * (1.0 / 132.0 + u * (-691.0 / 32760.0))))));
    return acc + std::log(x) - 0.5 / x - tail;
}

} // namespace fracflow::special
