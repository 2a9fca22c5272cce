#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fracflow/errors.hpp"
#include "fracflow/gridsolver/operator.hpp"
#include "fracflow/kernels/params.hpp"
#include "fracflow/special/frac_calc.hpp"
#include "fracflow/transform/grid.hpp"

namespace fracflow::gridsolver {

// Bookkeeping for the full-memory march: every past field participates in the
// next step, so the history and the weight cache grow together.
struct MemoryState {
    std::vector<transform::Field> history;  // history[k] is the state at t_k
    std::vector<double> weights;            // Grunwald-Letnikov weight cache
    std::size_t step = 0;

    bool consistent() const { return history.size() == step + 1; }

    void advance(transform::Field next) {
        history.push_back(std::move(next));
        ++step;
    }
};

namespace detail {

// In-place lower Cholesky factorization of a dense symmetric matrix; returns
// false when a pivot collapses (matrix not positive definite).
inline bool cholesky_factor(std::vector<double>& a, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
        if (!(diag > 0.0) || !std::isfinite(diag)) return false;
        const double root = std::sqrt(diag);
        a[j * n + j] = root;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / root;
        }
    }
    return true;
}

inline void cholesky_solve(const std::vector<double>& l, std::size_t n,
                           std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * x[k];
        x[i] = s / l[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l[k * n + ii] * x[k];
        x[ii] = s / l[ii * n + ii];
    }
}

}  // namespace detail

// Implicit march for d_t^alpha (u - u0) + A u = 0 with the discrete memory
// derivative dt^{-alpha} sum_k w_k (u_{n-k} - u0).  Each step solves
//
//   (dt^{-alpha} I + A) u_n = dt^{-alpha} (u0 - sum_{k>=1} w_k (u_{n-k} - u0)),
//
// a fixed symmetric positive definite system, so the matrix is factored once
// and reused.  At alpha = 1 the weights degenerate to (1, -1, 0, ...) and the
// march is exactly the memoryless implicit Euler scheme.
//
// Returns n_steps + 1 fields, the initial state included at time 0.
inline std::vector<transform::Field> evolve(const kernels::FracParams& prm,
                                            const NonlocalOperator& op,
                                            const transform::Field& u0,
                                            double dt, std::size_t n_steps) {
    prm.validate();
    u0.validate();
    if (!(u0.grid == op.grid))
        throw std::invalid_argument("evolve: initial field grid mismatch");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("evolve: dt must be positive");
    if (n_steps == 0) throw std::invalid_argument("evolve: n_steps must be >= 1");
    if (prm.d != 1)
        throw std::invalid_argument("evolve: only d = 1 grids are evolved");

    const std::size_t n = op.size();
    const double dt_pow = std::pow(dt, -prm.alpha);

    // Assemble dt^{-alpha} I + A from the difference-form weights.
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double w = op.weights[i * n + j];
            row_sum += w;
            m[i * n + j] = -w;
        }
        m[i * n + i] = dt_pow + row_sum + op.confinement[i];
    }
    if (!detail::cholesky_factor(m, n))
        throw LinearSolveFailure(
            "evolve: implicit matrix is not positive definite");

    MemoryState st;
    st.weights = special::gl_weights(prm.alpha, n_steps + 1);
    transform::Field start = u0;
    start.time = 0.0;
    st.history.push_back(std::move(start));

    std::vector<double> rhs(n);
    while (st.step < n_steps) {
        const std::size_t next = st.step + 1;
        // rhs = dt^{-alpha} (u0 - sum_{k=1}^{next} w_k (u_{next-k} - u0))
        for (std::size_t i = 0; i < n; ++i) rhs[i] = u0.values[i];
        for (std::size_t k = 1; k <= next; ++k) {
            const double wk = st.weights[k];
            if (wk == 0.0) continue;
            const auto& past = st.history[next - k].values;
            for (std::size_t i = 0; i < n; ++i)
                rhs[i] -= wk * (past[i] - u0.values[i]);
        }
        for (std::size_t i = 0; i < n; ++i) rhs[i] *= dt_pow;

        detail::cholesky_solve(m, n, rhs);
        transform::Field fld{op.grid, rhs, static_cast<double>(next) * dt};
        st.advance(std::move(fld));
        if (!st.consistent())
            throw LinearSolveFailure("evolve: memory bookkeeping corrupted");
    }
    return st.history;
}

}  // namespace fracflow::gridsolver
