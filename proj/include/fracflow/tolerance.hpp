#pragma once

#include <stdexcept>

namespace fracflow {

// Shared convergence knobs for the series evaluators.  A result is
// accepted once the estimated error drops below
//   abs_tol + rel_tol * |value|.
struct ToleranceConfig {
    double abs_tol = 1e-13;
    double rel_tol = 1e-10;
    int max_terms = 600;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw std::invalid_argument("ToleranceConfig: tolerances must be positive");
        if (max_terms < 8)
            throw std::invalid_argument("ToleranceConfig: max_terms must be at least 8");
    }

    double threshold(double value_magnitude) const {
        return abs_tol + rel_tol * value_magnitude;
    }
};

} // namespace fracflow
