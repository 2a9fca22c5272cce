#pragma once

// Parameter block and pole bookkeeping for Mellin-Barnes gamma-ratio
// functions ("Fox H"-type).  The kernel is
//
//     K(s) = prod_{j<m} G(b_j + B_j s) * prod_{i<n} G(1 - a_i - A_i s)
//            -----------------------------------------------------------
//            prod_{i>=n} G(a_i + A_i s) * prod_{j>=m} G(1 - b_j - B_j s)
//
// with upper parameter pairs (a_i, A_i), i = 0..p-1, and lower pairs
// (b_j, B_j), j = 0..q-1.  The function itself is the inverse Mellin
// transform of K along a contour separating the "left" pole ladders
// (from the first m lower gammas) from the "right" ones (first n upper
// gammas).  Evaluation lives in eval.hpp; this header owns the static
// structure: validation, the kernel, the argument-inversion swap, the
// convergence discriminant, and pole enumeration with collision grouping.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fracflow/errors.hpp"
#include "fracflow/special/gamma.hpp"
#include "fracflow/tolerance.hpp"

namespace fracflow::foxh {

struct FoxHSpec {
    int m = 0;  // leading lower gammas (numerator, left pole ladders)
    int n = 0;  // leading upper gammas (numerator, right pole ladders)
    int p = 0;  // total upper pairs
    int q = 0;  // total lower pairs
    std::vector<std::pair<double, double>> upper;  // (a_i, A_i), size p
    std::vector<std::pair<double, double>> lower;  // (b_j, B_j), size q

    void validate() const {
        if (p != static_cast<int>(upper.size()) || q != static_cast<int>(lower.size()))
            throw std::invalid_argument("FoxHSpec: p/q do not match pair counts");
        if (n < 0 || n > p || m < 0 || m > q)
            throw std::invalid_argument("FoxHSpec: need 0 <= n <= p and 0 <= m <= q");
        if (m + n == 0)
            throw std::invalid_argument("FoxHSpec: no numerator gammas (m + n == 0)");
        for (const auto& [a, w] : upper)
            if (!(w > 0.0) || !std::isfinite(a))
                throw std::invalid_argument("FoxHSpec: upper weights must be positive and finite");
        for (const auto& [b, w] : lower)
            if (!(w > 0.0) || !std::isfinite(b))
                throw std::invalid_argument("FoxHSpec: lower weights must be positive and finite");
    }
};

// Controls for the evaluator.  crossover_z sets the argument scale at
// which the dispatcher prefers the large-argument route; collision_eps
// is the pole-coincidence tolerance (two ladder points closer than this
// are treated as one higher-order pole).
struct EvalPolicy {
    ToleranceConfig tol{};
    double crossover_z = 1.0;
    double collision_eps = 1e-9;

    void validate() const {
        tol.validate();
        if (!(crossover_z > 0.0))
            throw std::invalid_argument("EvalPolicy: crossover_z must be positive");
        if (!(collision_eps > 0.0) || collision_eps > 1e-6)
            throw std::invalid_argument("EvalPolicy: collision_eps must lie in (0, 1e-6]");
    }
};

// One (possibly merged) pole location.  `order` counts the numerator
// gammas singular there -- the *gross* multiplicity, before any
// denominator zeros cancel it; the evaluator resolves that part.
// `indices` lists the contributing (ladder, step) pairs, where ladder
// is the index j < m (left) or i < n (right) and step is the ladder
// position l >= 0.
struct PoleGroup {
    double location = 0.0;
    int order = 0;
    std::vector<std::pair<int, int>> indices;
};

struct PoleSet {
    std::vector<PoleGroup> left;   // descending locations (s <= ...)
    std::vector<PoleGroup> right;  // ascending locations
};

// Exchanging upper<->lower pairs via (c, w) -> (1 - c, w) gives a spec
// whose kernel is K(-s), so the swapped function evaluates the original
// at the reciprocal argument: H_swap(1/z) = H(z).
inline FoxHSpec swap_argument(const FoxHSpec& spec) {
    FoxHSpec out;
    out.m = spec.n;
    out.n = spec.m;
    out.p = spec.q;
    out.q = spec.p;
    out.upper.reserve(spec.lower.size());
    for (const auto& [b, w] : spec.lower) out.upper.emplace_back(1.0 - b, w);
    out.lower.reserve(spec.upper.size());
    for (const auto& [a, w] : spec.upper) out.lower.emplace_back(1.0 - a, w);
    return out;
}

// Convergence discriminant: sum of lower weights minus sum of upper
// weights.  Positive => the small-argument (left) series is entire and
// the right series is asymptotic; negative => the roles reverse; zero
// => both are power series with the finite radius below.
inline double delta_weight(const FoxHSpec& spec) {
    double d = 0.0;
    for (const auto& [b, w] : spec.lower) d += w;
    for (const auto& [a, w] : spec.upper) d -= w;
    return d;
}

// Radius of convergence of the left series in the balanced case
// (delta_weight == 0): prod A_i^{-A_i} * prod B_j^{B_j}.
inline double borderline_radius(const FoxHSpec& spec) {
    double lg = 0.0;
    for (const auto& [a, w] : spec.upper) lg -= w * std::log(w);
    for (const auto& [b, w] : spec.lower) lg += w * std::log(w);
    return std::exp(lg);
}

inline std::complex<double> mellin_kernel(const FoxHSpec& spec, std::complex<double> s) {
    using special::log_gamma;
    std::complex<double> acc = 0.0;
    for (int j = 0; j < spec.q; ++j) {
        const auto& [b, w] = spec.lower[j];
        if (j < spec.m)
            acc += log_gamma(std::complex<double>(b + w * s.real(), w * s.imag()));
        else
            acc -= log_gamma(std::complex<double>(1.0 - b - w * s.real(), -w * s.imag()));
    }
    for (int i = 0; i < spec.p; ++i) {
        const auto& [a, w] = spec.upper[i];
        if (i < spec.n)
            acc += log_gamma(std::complex<double>(1.0 - a - w * s.real(), -w * s.imag()));
        else
            acc -= log_gamma(std::complex<double>(a + w * s.real(), w * s.imag()));
    }
    return std::exp(acc);
}

namespace detail {

// Merge raw ladder points into PoleGroups.  Points are supplied sorted
// by |location|; two count as coincident when within eps*(1+|s|).
inline std::vector<PoleGroup> group_poles(std::vector<std::pair<double, std::pair<int, int>>> pts,
                                          double eps) {
    std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) {
        return std::abs(x.first) < std::abs(y.first);
    });
    std::vector<PoleGroup> out;
    for (const auto& [loc, idx] : pts) {
        if (!out.empty() &&
            std::abs(loc - out.back().location) <= eps * (1.0 + std::abs(loc))) {
            out.back().order += 1;
            out.back().indices.push_back(idx);
        } else {
            out.push_back({loc, 1, {idx}});
        }
    }
    return out;
}

}  // namespace detail

// First `count` pole groups on each side, nearest-first.
inline PoleSet enumerate_poles(const FoxHSpec& spec, int count,
                               double collision_eps = 1e-9) {
    spec.validate();
    if (count < 1) throw std::invalid_argument("enumerate_poles: count must be >= 1");
    std::vector<std::pair<double, std::pair<int, int>>> left_pts, right_pts;
    for (int j = 0; j < spec.m; ++j) {
        const auto& [b, w] = spec.lower[j];
        for (int l = 0; l <= count; ++l)
            left_pts.push_back({-(b + l) / w, {j, l}});
    }
    for (int i = 0; i < spec.n; ++i) {
        const auto& [a, w] = spec.upper[i];
        for (int k = 0; k <= count; ++k)
            right_pts.push_back({(1.0 - a + k) / w, {i, k}});
    }
    PoleSet out;
    out.left = detail::group_poles(std::move(left_pts), collision_eps);
    out.right = detail::group_poles(std::move(right_pts), collision_eps);
    if (static_cast<int>(out.left.size()) > count) out.left.resize(count);
    if (static_cast<int>(out.right.size()) > count) out.right.resize(count);
    return out;
}

}  // namespace fracflow::foxh
