#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracflow/transform/grid.hpp"

namespace fracflow::decay {

// Time-stamped sequence of norm values; p and the weak flag record which
// functional produced it.
struct NormSeries {
    std::vector<double> times;
    std::vector<double> values;
    double p = 2.0;
    bool weak = false;

    void validate() const {
        if (times.size() != values.size())
            throw std::invalid_argument("NormSeries: times/values length mismatch");
        for (std::size_t i = 0; i + 1 < times.size(); ++i)
            if (!(times[i] < times[i + 1]))
                throw std::invalid_argument(
                    "NormSeries: times must be strictly increasing");
        for (double v : values)
            if (!(v >= 0.0))
                throw std::invalid_argument("NormSeries: values must be >= 0");
    }
};

// Grid L^p norm (h^d sum |u|^p)^{1/p}; p = inf gives the max norm.
inline double lp_norm(const transform::Field& u, double p) {
    u.validate();
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : u.values) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p >= 1.0))
        throw std::invalid_argument("lp_norm: p must be >= 1 or infinity");
    double acc = 0.0;
    for (double v : u.values) acc += std::pow(std::abs(v), p);
    return std::pow(acc * std::pow(u.grid.spacing(), u.grid.d), 1.0 / p);
}

// Weak L^p (Marcinkiewicz) quasinorm sup_l l * meas{|u| > l}^{1/p}, with the
// level set measured by counting cells.  The supremum is scanned on a
// geometric ladder of 64 levels between the smallest positive |u| and the
// largest; for fields with power-law tails the maximizing level sits well
// inside that range.  Always <= lp_norm(u, p) by Chebyshev, and the scan can
// only undershoot the true supremum, so that ordering is exact here too.
inline double weak_lp_quasinorm(const transform::Field& u, double p) {
    u.validate();
    if (!(p > 1.0) || std::isinf(p))
        throw std::invalid_argument("weak_lp_quasinorm: requires finite p > 1");
    double lo = 0.0, hi = 0.0;
    for (double v : u.values) {
        const double a = std::abs(v);
        hi = std::max(hi, a);
        if (a > 0.0 && (lo == 0.0 || a < lo)) lo = a;
    }
    if (hi == 0.0) return 0.0;

    const double cell = std::pow(u.grid.spacing(), u.grid.d);
    constexpr int kLevels = 64;
    const double ratio = std::pow(hi / lo, 1.0 / (kLevels - 1));
    double best = 0.0;
    for (int j = 0; j < kLevels; ++j) {
        // Nudge each level down so the top one still sees the maximal cells.
        const double level = lo * std::pow(ratio, j) * (1.0 - 1e-12);
        std::size_t count = 0;
        for (double v : u.values)
            if (std::abs(v) > level) ++count;
        if (count == 0) continue;
        best = std::max(
            best, level * std::pow(cell * static_cast<double>(count), 1.0 / p));
    }
    return best;
}

// Discrete Gagliardo seminorm [u]_{W^{s,p}} on a 1-d grid:
//   ( sum_{i != j} |u_i - u_j|^p / |x_i - x_j|^{1+sp} * h^2 )^{1/p}.
// Nearest-neighbour pairs carry the same cell-local boost the nonlocal
// operator assembly uses, standing in for the |x-y| < h part of the double
// integral that the point sum misses entirely.
inline double gagliardo_seminorm(const transform::Field& u, double s, double p) {
    u.validate();
    if (u.grid.d != 1)
        throw std::invalid_argument("gagliardo_seminorm: 1-d fields only");
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("gagliardo_seminorm: s must be in (0,1)");
    if (p != 1.0 && p != 2.0)
        throw std::invalid_argument("gagliardo_seminorm: p must be 1 or 2");

    const double h = u.grid.spacing();
    const double b = s * p;  // singularity exponent 1 + b, b < 2 always
    const double boost = 1.0 + std::pow(2.0, b - 2.0) / (2.0 - b);
    const std::size_t n = u.values.size();
    std::vector<double> inv_pow(n, 0.0);  // 1 / (k h)^{1+b} by lag k
    for (std::size_t k = 1; k < n; ++k)
        inv_pow[k] = std::pow(h * static_cast<double>(k), -(1.0 + b));
    if (n > 1) inv_pow[1] *= boost;

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double diff = std::abs(u.values[i] - u.values[j]);
            if (diff == 0.0) continue;
            acc += (p == 1.0 ? diff : diff * diff) * inv_pow[j - i];
        }
    }
    return std::pow(2.0 * acc * h * h, 1.0 / p);
}

}  // namespace fracflow::decay
