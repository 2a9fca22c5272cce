#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fracflow/errors.hpp"

namespace fracflow::kernels {

// Parameter triple for the time-fractional, space-nonlocal diffusion model:
// order alpha in (0,1] of the memory derivative, order beta in (0,2] of the
// spatial operator, and the space dimension d.  alpha = 1 is plain first-order
// time stepping; beta = 2 is the classical Laplacian.
//
// Several qualitative switches below (log-corrected profiles, finiteness at
// the origin, which L^p bounds hold) hinge on exact coincidences such as
// beta = d or d = 2 beta.  Floating-point inputs that are meant to sit on
// such a borderline may miss it by rounding, so all those comparisons go
// through `close(a, b)` with the relative slack `borderline_snap`.
struct FracParams {
    double alpha = 1.0;
    double beta = 2.0;
    int d = 1;
    double borderline_snap = 1e-9;

    void validate() const {
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::invalid_argument("FracParams: alpha must lie in (0, 1]");
        if (!(beta > 0.0) || beta > 2.0)
            throw std::invalid_argument("FracParams: beta must lie in (0, 2]");
        if (d < 1)
            throw std::invalid_argument("FracParams: dimension must be >= 1");
        if (!(borderline_snap > 0.0) || borderline_snap > 1e-6)
            throw std::invalid_argument("FracParams: borderline_snap out of range");
    }

    bool close(double a, double b) const {
        return std::abs(a - b) <= borderline_snap * (1.0 + std::abs(a) + std::abs(b));
    }
    // alpha = 1 collapses the memory integral; many singular behaviours
    // below are artifacts of alpha < 1 and vanish in this limit.
    bool heat_like() const { return close(alpha, 1.0); }
};

// The four self-similar profiles and the time derivative of the second one.
// Propagator: response to initial data.  Duhamel: response to forcing (the
// kernel convolved against f in time).
enum class KernelKind {
    Propagator,
    Duhamel,
    PropagatorGradient,
    DuhamelGradient,
    DuhamelTimeDerivative,
};

// Critical integrability exponents.  Near x = 0 the kernels behave like
// powers of |x| (for alpha < 1), and each kernel's L^p norm is finite
// exactly up to the exponent where that local power stops being
// p-integrable:
//   kappa1  gradient of the propagator   (local |x|^{beta-d-1})
//   kappa2  Duhamel kernel               (local |x|^{2 beta-d})
//   kappa3  propagator                   (local |x|^{beta-d})
// Infinity means the local singularity never obstructs (the kernel is
// p-integrable near 0 for every finite p).
struct KappaThresholds {
    double kappa1 = std::numeric_limits<double>::infinity();
    double kappa2 = std::numeric_limits<double>::infinity();
    double kappa3 = std::numeric_limits<double>::infinity();
};

inline KappaThresholds kappa_thresholds(const FracParams& prm) {
    prm.validate();
    const double d = static_cast<double>(prm.d);
    KappaThresholds out;
    if (d > prm.beta - 1.0 && !prm.close(d, prm.beta - 1.0))
        out.kappa1 = d / (d - prm.beta + 1.0);
    if (d > 2.0 * prm.beta && !prm.close(d, 2.0 * prm.beta))
        out.kappa2 = d / (d - 2.0 * prm.beta);
    if (d > prm.beta && !prm.close(d, prm.beta))
        out.kappa3 = d / (d - prm.beta);
    return out;
}

// ---------------------------------------------------------------------------
// Pointwise envelopes.
//
// Each kernel is bounded above by a pure power of t and r = |x| on either
// side of the self-similar interface R = r^beta t^{-alpha} = 1, with a
// logarithmic correction on the listed borderlines.  The envelopes carry no
// constant: callers check ratios kernel/envelope stay O(1), or use the
// exponents themselves.

enum class Regime { NearField, FarField };

struct RegimeEstimate {
    double R = 0.0;  // r^beta t^{-alpha}
    Regime regime = Regime::NearField;
    double envelope = 0.0;
};

inline RegimeEstimate asymptotic_envelope(KernelKind kind, const FracParams& prm,
                                          double t, double r) {
    prm.validate();
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("asymptotic_envelope: t must be positive");
    if (!(r >= 0.0) || !std::isfinite(r))
        throw std::invalid_argument("asymptotic_envelope: r must be >= 0");
    const double a = prm.alpha, b = prm.beta, d = static_cast<double>(prm.d);

    RegimeEstimate out;
    out.R = std::pow(r, b) * std::pow(t, -a);
    out.regime = out.R <= 1.0 ? Regime::NearField : Regime::FarField;
    const bool near = out.regime == Regime::NearField;
    // |log z| with z = 2^{-beta} R; strictly positive throughout the near
    // field since z <= 2^{-beta} < 1 there.
    const double log_term = std::abs(std::log(out.R) - b * std::log(2.0));

    switch (kind) {
        case KernelKind::Propagator:
            if (!near)
                out.envelope = std::pow(t, a) * std::pow(r, -d - b);
            else if (prm.heat_like() || (b > d && !prm.close(b, d)))
                out.envelope = std::pow(t, -a * d / b);
            else if (prm.close(b, d))
                out.envelope = std::pow(t, -a) * (std::abs(std::log(out.R)) + 1.0);
            else
                out.envelope = std::pow(t, -a) * std::pow(r, b - d);
            break;
        case KernelKind::Duhamel:
            if (!near)
                out.envelope = std::pow(t, 2.0 * a - 1.0) * std::pow(r, -d - b);
            else if (prm.heat_like() || (d < 2.0 * b && !prm.close(d, 2.0 * b)))
                out.envelope = std::pow(t, a - 1.0 - a * d / b);
            else if (prm.close(d, 2.0 * b))
                out.envelope = std::pow(t, -a - 1.0) * log_term;
            else
                out.envelope = std::pow(t, -a - 1.0) * std::pow(r, 2.0 * b - d);
            break;
        case KernelKind::PropagatorGradient:
            // The near-field power below also covers the heat-like case
            // (where the gradient in fact vanishes linearly at the origin):
            // it is an upper bound everywhere, just not sharp as r -> 0.
            if (!near)
                out.envelope = std::pow(t, a) * std::pow(r, -d - 1.0 - b);
            else
                out.envelope = std::pow(t, -a) * std::pow(r, b - d - 1.0);
            break;
        case KernelKind::DuhamelGradient:
            if (!near)
                out.envelope = std::pow(t, 2.0 * a - 1.0) * std::pow(r, -d - 1.0 - b);
            else if (prm.heat_like() || (d + 2.0 < 2.0 * b && !prm.close(d + 2.0, 2.0 * b)))
                out.envelope = std::pow(t, a - 1.0 - a * (d + 2.0) / b) * r;
            else if (prm.close(d + 2.0, 2.0 * b))
                out.envelope = std::pow(t, -a - 1.0) * r * log_term;
            else
                out.envelope = std::pow(t, -a - 1.0) * std::pow(r, 2.0 * b - d - 1.0);
            break;
        case KernelKind::DuhamelTimeDerivative: {
            if (!near) {
                out.envelope = std::pow(t, 2.0 * a - 2.0) * std::pow(r, -d - b);
            } else {
                // One extra power of 1/t on top of the Duhamel envelope.
                RegimeEstimate inner = asymptotic_envelope(KernelKind::Duhamel, prm, t, r);
                out.envelope = inner.envelope / t;
            }
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// L^p decay bounds.
//
// By self-similarity each kernel's L^p norm is a pure power of t whenever it
// is finite; `rate` is that exponent.  At the critical kappa exponent the
// strong norm diverges but the weak (Marcinkiewicz) quasinorm is still
// finite, with its own rate; `weak` flags that case.  `finite = false` means
// no bound of either kind.  p may be infinity.

struct LpBound {
    bool finite = false;
    bool weak = false;
    double rate = 0.0;
};

inline LpBound kernel_lp_bound(KernelKind kind, const FracParams& prm, double p) {
    prm.validate();
    if (!(p >= 1.0))
        throw std::invalid_argument("kernel_lp_bound: p must be >= 1");
    const double a = prm.alpha, b = prm.beta, d = static_cast<double>(prm.d);
    const double dual = std::isinf(p) ? 1.0 : 1.0 - 1.0 / p;  // 1 - 1/p
    const KappaThresholds kap = kappa_thresholds(prm);

    const auto strong = [](double rate) { return LpBound{true, false, rate}; };
    const auto weak_at = [](double rate) { return LpBound{true, true, rate}; };
    const auto critical = [&](double kappa) {
        return std::isfinite(p) && std::isfinite(kappa) && prm.close(p, kappa);
    };

    switch (kind) {
        case KernelKind::Propagator: {
            const double rate = -(a * d / b) * dual;
            if (prm.heat_like() || (b > d && !prm.close(b, d))) return strong(rate);
            // alpha < 1, beta <= d: local power |x|^{beta-d} caps p.
            if (critical(kap.kappa3)) return weak_at(-a);
            if (p < kap.kappa3) return strong(rate);
            return LpBound{};
        }
        case KernelKind::Duhamel: {
            const double rate = a - 1.0 - (a * d / b) * dual;
            if (prm.heat_like() || (d < 2.0 * b && !prm.close(d, 2.0 * b)))
                return strong(rate);
            if (prm.close(d, 2.0 * b))  // logarithmic local blowup: every finite p
                return std::isinf(p) ? LpBound{} : strong(rate);
            if (critical(kap.kappa2)) return weak_at(-1.0 - a);
            if (p < kap.kappa2) return strong(rate);
            return LpBound{};
        }
        case KernelKind::PropagatorGradient: {
            const double rate = -(a * d / b) * dual - a / b;
            if (prm.heat_like()) return strong(rate);
            // d <= beta - 1 (only d = 1, beta = 2): gradient stays bounded.
            if (!std::isfinite(kap.kappa1)) return strong(rate);
            if (critical(kap.kappa1)) return weak_at(-a);
            if (p < kap.kappa1) return strong(rate);
            return LpBound{};
        }
        default:
            throw std::invalid_argument(
                "kernel_lp_bound: only the propagator, Duhamel and propagator-"
                "gradient kernels have tabulated L^p bounds");
    }
}

}  // namespace fracflow::kernels
