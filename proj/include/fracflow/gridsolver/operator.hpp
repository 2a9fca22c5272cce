#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fracflow/gridsolver/kernel.hpp"
#include "fracflow/transform/grid.hpp"

namespace fracflow::gridsolver {

// Collocation discretization of u -> PV int (u(x) - u(y)) K(x, y) dy on the
// uniform grid, split into two parts:
//
//  * `weights` — the symmetric interaction table W_ij (diagonal zero).  The
//    difference form sum_j W_ij (u_i - u_j) annihilates constants exactly.
//  * `confinement` — a diagonal accounting for the kernel mass outside the
//    covered interval, where the field is taken to vanish.  Computed from the
//    upper envelope, so the discrete operator stays dissipative for any
//    admissible kernel.
//
// apply() with the confinement on is what the evolution uses; switching it
// off recovers the pure interaction part (useful when comparing against the
// whole-line symbol away from the boundary).
struct NonlocalOperator {
    transform::SpectralGrid grid;
    std::vector<double> weights;      // n*n row-major, W[i*n+j]
    std::vector<double> confinement;  // length n

    std::size_t size() const { return static_cast<std::size_t>(grid.n); }

    std::vector<double> apply(const std::vector<double>& u,
                              bool include_confinement = true) const {
        const std::size_t n = size();
        if (u.size() != n)
            throw std::invalid_argument("NonlocalOperator::apply: size mismatch");
        std::vector<double> out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = weights.data() + i * n;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += row[j] * (u[i] - u[j]);
            if (include_confinement) acc += confinement[i] * u[i];
            out[i] = acc;
        }
        return out;
    }

    transform::Field apply(const transform::Field& u,
                           bool include_confinement = true) const {
        if (!(u.grid == grid))
            throw std::invalid_argument("NonlocalOperator::apply: grid mismatch");
        transform::Field out{grid, apply(u.values, include_confinement), u.time};
        return out;
    }

    // u . (A u), confinement included; nonnegative for admissible kernels.
    double quadratic_form(const std::vector<double>& u) const {
        const auto au = apply(u);
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * au[i];
        return acc;
    }
};

// Builds the dense interaction table and confinement diagonal.
//
// Off-diagonal entries are the midpoint rule K(x_i, x_j) h.  That omits the
// principal-value integral over the singular self cell; for smooth fields its
// leading contribution is -u'' * c (h/2)^{2-beta} / (2-beta), which in
// difference form is exactly an extra weight on the two adjacent neighbors.
// Dropping it would cost an O(h^{2-beta}) error in the symbol, so it is folded
// into W_{i,i+-1} with the local kernel strength estimated from the adjacent
// entry itself (c ~ K(x_i, x_j) h^{1+beta}).
inline NonlocalOperator assemble_operator(const KernelSpec& spec,
                                          const transform::SpectralGrid& grid) {
    spec.validate();
    grid.validate();
    if (grid.d != 1)
        throw std::invalid_argument("assemble_operator: only d = 1 is supported");

    const std::size_t n = static_cast<std::size_t>(grid.n);
    const double h = grid.spacing();
    const double half_cell = std::pow(0.5 * h, 2.0 - spec.beta) /
                             ((2.0 - spec.beta) * h * h);

    NonlocalOperator op;
    op.grid = grid;
    op.weights.assign(n * n, 0.0);
    op.confinement.assign(n, 0.0);

    // The adjacent-neighbor correction scales the plain midpoint weight by a
    // dimensionless factor (1 + 2^{beta-2}/(2-beta)), so it applies
    // identically to both orientations.
    const double adjacent_boost = 1.0 + std::pow(h, spec.beta) * half_cell;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = grid.coord(static_cast<int>(i));
        for (std::size_t j = i + 1; j < n; ++j) {
            const double xj = grid.coord(static_cast<int>(j));
            const double boost = j == i + 1 ? adjacent_boost : 1.0;
            const double w = spec.kernel_fn(xi, xj) * h * boost;
            op.weights[i * n + j] = w;
            op.weights[j * n + i] =
                spec.symmetric ? w : spec.kernel_fn(xj, xi) * h * boost;
        }
    }

    // Cells cover [-L - h/2, L - h/2); beyond that the field is treated as
    // zero and the interaction integrates the upper envelope exactly:
    // int_R^inf lambda_upper s^{-1-beta} ds = lambda_upper R^{-beta} / beta.
    const double lo_edge = -grid.half_width - 0.5 * h;
    const double hi_edge = grid.half_width - 0.5 * h;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = grid.coord(static_cast<int>(i));
        const double r_left = xi - lo_edge;
        const double r_right = hi_edge - xi;
        op.confinement[i] = spec.lambda_upper *
                            (std::pow(r_left, -spec.beta) +
                             std::pow(r_right, -spec.beta)) /
                            spec.beta;
    }
    return op;
}

}  // namespace fracflow::gridsolver
