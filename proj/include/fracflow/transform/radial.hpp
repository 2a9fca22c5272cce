#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fracflow/errors.hpp"
#include "fracflow/quadrature.hpp"

namespace fracflow::transform {

namespace detail {

// Zeros of the d-dependent oscillatory factor, in units of rho*r.  They cut
// the half-line into half-period panels over which the integrand alternates
// in sign once the radial profile decays monotonically.
inline double oscillation_node(int d, int m) {
    switch (d) {
        case 1: return (m + 0.5) * M_PI;                 // cos
        case 3: return (m + 1.0) * M_PI;                 // sin
        case 2: {
            // McMahon expansion of the m-th Bessel J0 zero; panel edges only
            // need a few digits.
            const double a = (m + 0.75) * M_PI;
            return a + 1.0 / (8.0 * a);
        }
        default:
            throw std::invalid_argument("radial transform: d must be 1, 2, or 3");
    }
}

// Repeated averaging of the m partial sums ending skip_end entries before
// the back of the sequence; differencing skip_end = 0 against skip_end = 1
// gives the step-to-step movement of the accelerated limit.
inline double averaged_tail(const std::vector<double>& partial, std::size_t m,
                            std::size_t skip_end) {
    const std::size_t end = partial.size() - skip_end;
    const std::size_t count = std::min(m, end);
    std::vector<double> row(
        partial.begin() + static_cast<std::ptrdiff_t>(end - count),
        partial.begin() + static_cast<std::ptrdiff_t>(end));
    while (row.size() > 1) {
        for (std::size_t i = 0; i + 1 < row.size(); ++i)
            row[i] = 0.5 * (row[i] + row[i + 1]);
        row.pop_back();
    }
    return row.front();
}

// One oscillation panel, subdivided until the 16-point rule is trusted;
// the early panels can be much wider than the profile's own scale when r is
// small, so a fixed-order rule alone is not safe there.
template <class F>
double panel_integral(F& f, double lo, double hi, double tol, int depth = 12) {
    return quad::adaptive_panel(f, lo, hi, tol, depth);
}

}  // namespace detail

// Inverse Fourier transform of a radial profile hat(|xi|) under the unitary
// convention, evaluated at radius r > 0:
//   d=1:  sqrt(2/pi)      * Int_0^inf hat(rho) cos(rho r)        d rho
//   d=2:                    Int_0^inf hat(rho) J0(rho r) rho     d rho
//   d=3:  sqrt(2/pi) / r  * Int_0^inf hat(rho) sin(rho r) rho   d rho
// The integrand is integrated over half-period panels of the oscillation;
// for slowly decaying profiles the alternating panel sums converge only
// conditionally, so the tail is resummed by repeated averaging of the
// partial sums, which turns an O(n^{-s}) alternating tail into machine
// precision within a few dozen panels.
template <class Hat>
double radial_profile_from_hat(Hat&& hat, int d, double r,
                               double abs_tol = 1e-11, int max_panels = 4000) {
    if (d < 1 || d > 3)
        throw std::invalid_argument("radial transform: d must be 1, 2, or 3");
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::invalid_argument(
            "radial transform: radius must be positive (the origin value is a "
            "separate limit)");

    const double c = std::sqrt(2.0 / M_PI);
    auto integrand = [&](double rho) -> double {
        switch (d) {
            case 1: return c * hat(rho) * std::cos(rho * r);
            case 2: return hat(rho) * std::cyl_bessel_j(0.0, rho * r) * rho;
            default: return c / r * hat(rho) * std::sin(rho * r) * rho;
        }
    };

    constexpr std::size_t kAverageDepth = 16;
    std::vector<double> partial;
    partial.reserve(64);
    double lo = 0.0, sum = 0.0;
    for (int m = 0; m < max_panels; ++m) {
        const double hi = detail::oscillation_node(d, m) / r;
        const double piece =
            detail::panel_integral(integrand, lo, hi, 0.125 * abs_tol);
        sum += piece;
        partial.push_back(sum);
        lo = hi;
        if (partial.size() >= 6) {
            // Fast path: the profile itself has died (e.g. Gaussian hats).
            if (std::abs(piece) < 0.25 * abs_tol &&
                std::abs(sum - partial[partial.size() - 2]) < 0.25 * abs_tol)
                return sum;
            if (partial.size() >= kAverageDepth) {
                const double est =
                    detail::averaged_tail(partial, kAverageDepth, 0);
                const double prev =
                    detail::averaged_tail(partial, kAverageDepth, 1);
                if (std::abs(est - prev) <
                    std::max(abs_tol, 1e-14 * std::abs(est)))
                    return est;
            }
        }
    }
    throw QuadratureUnderResolved(
        "radial transform: oscillatory tail did not settle within " +
        std::to_string(max_panels) + " panels");
}

}  // namespace fracflow::transform
