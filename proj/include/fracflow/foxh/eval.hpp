#pragma once

// Series evaluation of Mellin-Barnes gamma-ratio functions by residue
// summation.  Each pole group contributes the residue of K(s) z^{-s};
// the machinery below expands every gamma factor to first order around
// the pole location, so coincident ladder points (higher-order poles,
// giving log z terms) and cancellations against denominator zeros fall
// out of the same bookkeeping instead of being special-cased.
//
// Magnitudes are carried in log space with an explicit sign, so exact
// structural zeros (a denominator gamma at a nonpositive integer) stay
// exact, and the whole pipeline runs in long double to keep the
// cancellation noise of humped series a few digits below double.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fracflow/errors.hpp"
#include "fracflow/foxh/spec.hpp"
#include "fracflow/special/gamma.hpp"

namespace fracflow::foxh {

struct HDeriv {
    double value = 0.0;    // H(z)
    double z_deriv = 0.0;  // z * H'(z)
};

namespace detail {

inline constexpr long double kLnPi = 1.1447298858494001741L;

// Laurent data of one gamma factor G(x0 + g*eps)^{+-1} at a pole
// location, eps being the contour variable offset.  `order` is the
// factor's power of eps (-1 numerator pole, +1 denominator zero),
// log_abs/sign the leading coefficient, dsum the first-order
// log-derivative, and log_env a smooth majorant of log_abs used for
// truncation control (it replaces the oscillatory reciprocal-gamma
// magnitude by its sine-free bound).
struct FactorAccum {
    int order = 0;
    long double log_abs = 0.0L;
    int sign = 1;
    long double dsum = 0.0L;
    long double log_env = 0.0L;
};

inline int gamma_sign_of(double x) {
    if (x > 0.0) return 1;
    return (static_cast<long long>(std::floor(x)) % 2 != 0) ? -1 : 1;
}

inline void accumulate_factor(FactorAccum& acc, double x0, double g, bool numerator,
                              double snap_eps) {
    const double r = std::round(x0);
    const bool at_pole = r <= 0.0 && std::abs(x0 - r) <= snap_eps * (1.0 + std::abs(x0));
    const int gsign = g > 0.0 ? 1 : -1;
    if (at_pole) {
        const double l = -r;
        const long double lfact = lgammal(static_cast<long double>(l) + 1.0L);
        const long double lg = logl(fabsl(static_cast<long double>(g)));
        const int parity = (static_cast<long long>(l) % 2 == 0) ? 1 : -1;
        const double psi = special::digamma(l + 1.0);
        if (numerator) {
            // G(-l + g*eps) = [(-1)^l / (l! g)] eps^{-1} (1 + g psi(l+1) eps + ...)
            acc.order -= 1;
            acc.log_abs += -lfact - lg;
            acc.sign *= parity * gsign;
            acc.dsum += g * psi;
            acc.log_env += -lfact - lg;
        } else {
            // 1/G(-l + g*eps) = g (-1)^l l! eps (1 - g psi(l+1) eps + ...)
            acc.order += 1;
            acc.log_abs += lfact + lg;
            acc.sign *= parity * gsign;
            acc.dsum += -g * psi;
            acc.log_env += lfact + lg;
        }
        return;
    }
    const long double la = lgammal(static_cast<long double>(x0));
    const int s = gamma_sign_of(x0);
    const double psi = special::digamma(x0);
    if (numerator) {
        acc.log_abs += la;
        acc.sign *= s;
        acc.dsum += g * psi;
        acc.log_env += la;
    } else {
        acc.log_abs -= la;
        acc.sign *= s;
        acc.dsum += -g * psi;
        // |1/G(x)| = |sin(pi x)| G(1-x) / pi <= G(1-x)/pi for x < 1/2; the
        // sine factor is what makes raw term magnitudes oscillate, so the
        // envelope drops it.
        acc.log_env += x0 >= 0.5 ? -la
                                 : lgammal(1.0L - static_cast<long double>(x0)) - kLnPi;
    }
}

struct ResidueTerm {
    long double value = 0.0L;   // residue of K(s) z^{-s} at the location
    long double dvalue = 0.0L;  // z d/dz of the same
    long double log_env = 0.0L; // smooth majorant of log|value|
    int net_order = 0;          // eps-power of the full kernel there (>= 0: no pole)
    bool structural_zero = false;
};

// Expand every gamma factor at s0 and assemble the residue.  The net
// eps-power decides the shape: >= 0 means the location is not actually
// a pole of the full kernel (residue exactly zero), -1 a simple pole,
// -2 a double pole contributing a log z term.
inline ResidueTerm residue_at(const FoxHSpec& spec, double s0, long double lnz,
                              double snap_eps) {
    FactorAccum acc;
    for (int j = 0; j < spec.q; ++j) {
        const auto& [b, w] = spec.lower[j];
        if (j < spec.m)
            accumulate_factor(acc, b + w * s0, w, true, snap_eps);
        else
            accumulate_factor(acc, 1.0 - b - w * s0, -w, false, snap_eps);
    }
    for (int i = 0; i < spec.p; ++i) {
        const auto& [a, w] = spec.upper[i];
        if (i < spec.n)
            accumulate_factor(acc, 1.0 - a - w * s0, -w, true, snap_eps);
        else
            accumulate_factor(acc, a + w * s0, w, false, snap_eps);
    }

    ResidueTerm out;
    out.net_order = acc.order;
    const long double expo = acc.log_abs - static_cast<long double>(s0) * lnz;
    out.log_env = acc.log_env - static_cast<long double>(s0) * lnz;
    if (acc.order >= 0) {
        out.structural_zero = true;
        return out;
    }
    if (acc.order <= -3)
        throw PoleHit("pole of order " + std::to_string(-acc.order) +
                      " at s = " + std::to_string(s0) + " not supported");
    if (expo > 11000.0L) {
        // expl would overflow; report an unusable (infinite) term.
        out.value = std::numeric_limits<long double>::infinity();
        out.dvalue = out.value;
        return out;
    }
    const long double mag = acc.sign * expl(expo);
    if (acc.order == -1) {
        out.value = mag;
        out.dvalue = -static_cast<long double>(s0) * mag;
        return out;
    }
    const long double bracket = static_cast<long double>(acc.dsum) - lnz;
    out.value = mag * bracket;
    out.dvalue = mag * (-static_cast<long double>(s0) * bracket - 1.0L);
    out.log_env += logl(fabsl(bracket) + 1.0L);
    return out;
}

struct BranchResult {
    double value = 0.0;
    double deriv = 0.0;  // z H'(z)
    double err_est = std::numeric_limits<double>::infinity();
};

// Relative noise attached to the largest intermediate term: each term is
// a handful of long-double lgamma evaluations, so a couple thousand ulps
// covers the pipeline.
inline constexpr long double kTermNoise = 1e-16L;

inline double as_double(long double x) { return static_cast<double>(x); }

inline long double exp_capped(long double x) { return expl(std::min(x, 700.0L)); }

// Sum residues over one side's pole groups, nearest-first.
//
// Convergent mode: run until term magnitudes are quiet (a run of
// consecutive nonzero terms below a tenth of the acceptance threshold,
// long enough to cover every interleaved ladder); error = omitted term
// + geometric tail + cancellation noise scaled by the largest term.
//
// Asymptotic mode: optimal truncation per ladder.  Each ladder of poles
// has a smooth term envelope that decays to a minimum and then grows;
// a ladder closes at its first envelope upturn (or once its envelope is
// negligible) and charges the omitted envelope as its share of the
// error.  Tracking ladders separately matters because merged ladders
// interleave terms of very different size, which would make the raw
// magnitude sequence sawtooth and fool a single global upturn test.
inline BranchResult sum_side(const FoxHSpec& spec, const std::vector<PoleGroup>& groups,
                             int n_ladders, long double lnz, const EvalPolicy& policy,
                             bool asymptotic, double outer_sign) {
    const auto& tol = policy.tol;
    long double sum = 0.0L, dsum = 0.0L;
    long double max_env = -std::numeric_limits<long double>::infinity();
    long double last_mag = 0.0L, prev_mag = 0.0L;
    bool any_term = false;

    struct LadderState {
        long double prev_env = std::numeric_limits<long double>::infinity();
        int quiet = 0;
        bool closed = false;
        long double omit = 0.0L;
    };
    std::vector<LadderState> ladder(static_cast<std::size_t>(n_ladders));
    int open_count = n_ladders;
    const int quiet_needed = asymptotic ? 2 : n_ladders + 1;
    int quiet_run = 0;  // convergent mode only
    bool settled = false;
    long double omitted = 0.0L;

    for (const auto& g : groups) {
        if (asymptotic) {
            bool all_closed = true;
            for (const auto& [lad, step] : g.indices)
                if (!ladder[static_cast<std::size_t>(lad)].closed) all_closed = false;
            if (all_closed) continue;
        }
        const ResidueTerm t = residue_at(spec, g.location, lnz, policy.collision_eps);
        bool add = true;
        if (asymptotic) {
            add = false;
            const long double scale = tol.threshold(std::abs(as_double(sum)));
            for (const auto& [lad, step] : g.indices) {
                auto& st = ladder[static_cast<std::size_t>(lad)];
                if (st.closed) continue;
                if (t.log_env > st.prev_env) {
                    st.closed = true;
                    st.omit = exp_capped(t.log_env);
                    --open_count;
                    continue;  // upturn: this term is the ladder's omitted one
                }
                st.prev_env = t.log_env;
                if (exp_capped(t.log_env) <= 0.1L * scale) {
                    if (++st.quiet >= quiet_needed) {
                        st.closed = true;
                        st.omit = exp_capped(t.log_env);
                        --open_count;
                        continue;
                    }
                } else {
                    st.quiet = 0;
                }
                add = true;  // at least one ladder still wants this term
            }
            if (open_count == 0) {
                // Every ladder closed here; this term is omitted and already
                // charged to the error.
                settled = true;
                for (const auto& st : ladder) omitted += st.omit;
                break;
            }
        }
        if (!add) continue;
        if (!t.structural_zero) {
            if (!std::isfinite(as_double(t.value))) return {};  // overflowed: unusable
            sum += t.value;
            dsum += t.dvalue;
            any_term = true;
            prev_mag = last_mag;
            last_mag = fabsl(t.value);
            max_env = std::max(max_env, t.log_env);
            if (last_mag > 1e250L) return {};  // diverging: unusable
            if (!asymptotic) {
                const long double scale = tol.threshold(std::abs(as_double(sum)));
                if (last_mag <= 0.1L * scale) {
                    if (++quiet_run >= quiet_needed) {
                        settled = true;
                        omitted = last_mag;
                        break;
                    }
                } else {
                    quiet_run = 0;
                }
            }
        }
    }

    BranchResult out;
    out.value = outer_sign * as_double(sum);
    out.deriv = outer_sign * as_double(dsum);
    const double noise =
        max_env > -1e300L ? as_double(kTermNoise * exp_capped(max_env)) : 0.0;
    if (!settled) {
        if (asymptotic) {
            // Budget exhausted with ladders still descending: charge what has
            // been closed plus the current envelope of each open ladder.
            long double tail = 0.0L;
            for (const auto& st : ladder)
                tail += st.closed ? st.omit
                                  : (st.prev_env < 1e300L ? exp_capped(st.prev_env) : 0.0L);
            out.err_est = as_double(tail) + noise;
            return out;
        }
        if (!any_term) return out;  // nothing summed, nothing certified
        out.err_est = as_double(last_mag) + noise;
        if (prev_mag > 0.0L && last_mag >= prev_mag)
            out.err_est = std::numeric_limits<double>::infinity();
        return out;
    }
    long double tail = omitted;
    if (!asymptotic && prev_mag > 0.0L && last_mag > 0.0L) {
        const long double ratio = std::min(last_mag / prev_mag, 0.95L);
        tail += last_mag * ratio / (1.0L - ratio);
    }
    out.err_est = as_double(tail) + noise;
    return out;
}

inline BranchResult left_branch(const FoxHSpec& spec, double z, const EvalPolicy& policy) {
    if (spec.m == 0) return {};
    const PoleSet poles = enumerate_poles(spec, policy.tol.max_terms, policy.collision_eps);
    return sum_side(spec, poles.left, spec.m, logl(static_cast<long double>(z)), policy,
                    /*asymptotic=*/false, +1.0);
}

inline BranchResult right_branch(const FoxHSpec& spec, double z, const EvalPolicy& policy) {
    if (spec.n == 0) return {};
    const PoleSet poles = enumerate_poles(spec, policy.tol.max_terms, policy.collision_eps);
    const bool asymptotic = delta_weight(spec) > 0.0;
    return sum_side(spec, poles.right, spec.n, logl(static_cast<long double>(z)), policy,
                    asymptotic, -1.0);
}

// Reciprocal-argument route: H(z) = H_swap(1/z), so the swapped right
// series at 1/z gives a small-z expansion.  The z d/dz channel picks up
// a sign from the inversion.
inline BranchResult inverted_branch(const FoxHSpec& spec, double z,
                                    const EvalPolicy& policy) {
    BranchResult r = right_branch(swap_argument(spec), 1.0 / z, policy);
    r.deriv = -r.deriv;
    return r;
}

inline bool acceptable(const BranchResult& r, const ToleranceConfig& tol) {
    if (!std::isfinite(r.value) || !std::isfinite(r.err_est)) return false;
    const double bar =
        std::max({tol.threshold(std::abs(r.value)), 1e-7 * std::abs(r.value), 1e-8});
    return r.err_est <= bar;
}

inline void check_argument(double z) {
    if (!(z > 0.0) || !std::isfinite(z))
        throw std::invalid_argument("foxh: argument must be positive and finite");
}

inline BranchResult dispatch(const FoxHSpec& spec, double z, const EvalPolicy& policy) {
    const double delta = delta_weight(spec);
    std::array<BranchResult (*)(const FoxHSpec&, double, const EvalPolicy&), 3> routes{};
    int count = 0;
    if (delta > 0.0) {
        if (z <= policy.crossover_z)
            routes = {&left_branch, &right_branch, &inverted_branch};
        else
            routes = {&right_branch, &left_branch, &inverted_branch};
        count = 3;
    } else if (delta < 0.0) {
        if (z <= policy.crossover_z)
            routes = {&inverted_branch, &right_branch, nullptr};
        else
            routes = {&right_branch, &inverted_branch, nullptr};
        count = 2;
    } else {
        if (z < borderline_radius(spec))
            routes = {&left_branch, &right_branch, nullptr};
        else
            routes = {&right_branch, &left_branch, nullptr};
        count = 2;
    }
    BranchResult best;
    for (int i = 0; i < count; ++i) {
        const BranchResult r = routes[i](spec, z, policy);
        if (acceptable(r, policy.tol)) return r;
        if (std::isfinite(r.value) && r.err_est < best.err_est) best = r;
    }
    // Near the seam between expansions (argument around the conditioning
    // limit of the series and the truncation floor of the tail) neither
    // branch reaches full tolerance; accept a few lost digits there
    // rather than failing, but refuse outright garbage.
    const double relaxed = std::max({100.0 * policy.tol.threshold(std::abs(best.value)),
                                     1e-5 * std::abs(best.value), 1e-6});
    if (std::isfinite(best.value) && best.err_est <= relaxed) return best;
    throw NoConvergence("foxh eval: no expansion reached usable accuracy at z = " +
                        std::to_string(z));
}

}  // namespace detail

// Small-argument (left residue) series.  Throws OutOfConvergenceRegion
// when the spec's weights make that series divergent at z.
inline double eval_small(const FoxHSpec& spec, double z, const EvalPolicy& policy = {}) {
    spec.validate();
    policy.validate();
    detail::check_argument(z);
    const double delta = delta_weight(spec);
    if (delta < 0.0)
        throw OutOfConvergenceRegion(
            "eval_small: left series diverges for this spec (negative weight excess); "
            "use eval_small_inverted");
    if (delta == 0.0 && z > 0.9 * borderline_radius(spec))
        throw OutOfConvergenceRegion("eval_small: z = " + std::to_string(z) +
                                     " is outside the balanced-case radius " +
                                     std::to_string(borderline_radius(spec)));
    const detail::BranchResult r = detail::left_branch(spec, z, policy);
    if (!detail::acceptable(r, policy.tol))
        throw NoConvergence("eval_small: series did not reach tolerance at z = " +
                            std::to_string(z));
    return r.value;
}

// Small-argument evaluation through the reciprocal-argument identity:
// the swapped spec's large-argument series at 1/z.  This is the usable
// small-z route when the left series diverges.
inline double eval_small_inverted(const FoxHSpec& spec, double z,
                                  const EvalPolicy& policy = {}) {
    spec.validate();
    policy.validate();
    detail::check_argument(z);
    const detail::BranchResult r = detail::inverted_branch(spec, z, policy);
    if (!detail::acceptable(r, policy.tol)) {
        if (delta_weight(spec) < 0.0)
            throw AsymptoticUnreliable(
                "eval_small_inverted: optimal truncation error above tolerance at z = " +
                std::to_string(z) + "; argument not small enough");
        throw NoConvergence("eval_small_inverted: series did not reach tolerance at z = " +
                            std::to_string(z));
    }
    return r.value;
}

// Large-argument (right residue) series; asymptotic with optimal
// truncation when the weight excess is positive, convergent otherwise.
inline double eval_large(const FoxHSpec& spec, double z, const EvalPolicy& policy = {}) {
    spec.validate();
    policy.validate();
    detail::check_argument(z);
    const double delta = delta_weight(spec);
    if (delta == 0.0 && z < borderline_radius(spec) / 0.9)
        throw OutOfConvergenceRegion("eval_large: z = " + std::to_string(z) +
                                     " is inside the balanced-case radius " +
                                     std::to_string(borderline_radius(spec)));
    const detail::BranchResult r = detail::right_branch(spec, z, policy);
    if (!detail::acceptable(r, policy.tol)) {
        if (delta > 0.0)
            throw AsymptoticUnreliable(
                "eval_large: optimal truncation error above tolerance at z = " +
                std::to_string(z) + "; argument not large enough");
        throw NoConvergence("eval_large: series did not reach tolerance at z = " +
                            std::to_string(z));
    }
    return r.value;
}

// Branch-dispatching evaluation: tries the natural expansion for the
// argument first and falls back to the alternatives, returning the
// first that meets tolerance (or the best one if none quite does but
// it is still within the acceptance bar; otherwise NoConvergence).
inline double eval(const FoxHSpec& spec, double z, const EvalPolicy& policy = {}) {
    spec.validate();
    policy.validate();
    detail::check_argument(z);
    return detail::dispatch(spec, z, policy).value;
}

// Same dispatch, also returning z H'(z) (summed term-by-term; each
// residue differentiates in closed form).
inline HDeriv eval_deriv(const FoxHSpec& spec, double z, const EvalPolicy& policy = {}) {
    spec.validate();
    policy.validate();
    detail::check_argument(z);
    const detail::BranchResult r = detail::dispatch(spec, z, policy);
    return {r.value, r.deriv};
}

// Coefficient multiplying z^{-s0} in the small-argument sum, i.e. the
// residue of the kernel at the left pole s0 (exact zero if a denominator
// gamma cancels it).  PoleHit when the pole is logarithmic, since the
// contribution is then not a plain power.  Used for closed-form limits
// at special points, e.g. the value of a kernel on the diagonal r = 0.
inline double leading_coefficient(const FoxHSpec& spec, double s0,
                                  double collision_eps = 1e-9) {
    spec.validate();
    const detail::ResidueTerm t = detail::residue_at(spec, s0, 0.0L, collision_eps);
    if (t.net_order <= -2)
        throw PoleHit("leading_coefficient: pole at s = " + std::to_string(s0) +
                      " is logarithmic");
    return t.structural_zero ? 0.0 : detail::as_double(t.value);
}

// Coefficients h_k of the algebraic large-argument expansion
// H(z) ~ sum_k h_k z^{-s_k} along the first upper ladder
// s_k = (1 - a_0 + k)/A_0.  Cancelled ladder points give exact zeros;
// a coincident second ladder (log terms in the tail) is reported as
// PoleHit since no plain coefficient exists there.
inline std::vector<double> h_coefficients(const FoxHSpec& spec, int count,
                                          double collision_eps = 1e-9) {
    spec.validate();
    if (spec.n < 1)
        throw std::invalid_argument("h_coefficients: spec has no right pole ladder");
    if (count < 1) throw std::invalid_argument("h_coefficients: count must be >= 1");
    const auto& [a0, w0] = spec.upper[0];
    std::vector<double> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        const double sk = (1.0 - a0 + k) / w0;
        const detail::ResidueTerm t = detail::residue_at(spec, sk, 0.0L, collision_eps);
        if (t.net_order <= -2)
            throw PoleHit("h_coefficients: tail term at s = " + std::to_string(sk) +
                          " is logarithmic, no plain coefficient exists");
        out.push_back(t.structural_zero ? 0.0 : -detail::as_double(t.value));
    }
    return out;
}

}  // namespace fracflow::foxh
