#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "fracflow/transform/fft.hpp"

namespace fracflow::transform {

// Uniform periodic grid on [-half_width, half_width)^d used by the spectral
// solver.  Mode k carries the signed index k~ in [-n/2, n/2) per axis and the
// continuous frequency pi*k~/half_width, so the discrete transform below is a
// trapezoidal approximation of the continuous one on the box.
struct SpectralGrid {
    int d = 1;                // 1 or 2
    int n = 256;              // points per axis, power of two
    double half_width = 10.0; // box [-half_width, half_width)^d

    void validate() const {
        if (d != 1 && d != 2)
            throw std::invalid_argument("SpectralGrid: d must be 1 or 2");
        if (n < 32 || !detail::is_power_of_two(static_cast<std::size_t>(n)))
            throw std::invalid_argument(
                "SpectralGrid: n must be a power of two >= 32");
        if (!(half_width > 0.0) || !std::isfinite(half_width))
            throw std::invalid_argument("SpectralGrid: half_width must be positive");
    }

    double spacing() const { return 2.0 * half_width / n; }
    std::size_t size() const {
        return d == 1 ? static_cast<std::size_t>(n)
                      : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    }
    double coord(int j) const { return -half_width + j * spacing(); }
    int signed_index(int k) const { return k < n / 2 ? k : k - n; }
    double frequency(int k) const { return M_PI * signed_index(k) / half_width; }

    // Squared modulus |xi|^2 of the mode with flat index idx.
    double frequency_sq(std::size_t idx) const {
        if (d == 1) {
            const double f = frequency(static_cast<int>(idx));
            return f * f;
        }
        const double fx = frequency(static_cast<int>(idx) / n);
        const double fy = frequency(static_cast<int>(idx) % n);
        return fx * fx + fy * fy;
    }

    bool operator==(const SpectralGrid& o) const {
        return d == o.d && n == o.n && half_width == o.half_width;
    }
};

// Real-valued sample of a spatial function at one instant.  Row-major for
// d = 2: values[jx * n + jy] lives at (coord(jx), coord(jy)).
struct Field {
    SpectralGrid grid;
    std::vector<double> values;
    double time = 0.0;

    void validate() const {
        grid.validate();
        if (values.size() != grid.size())
            throw std::invalid_argument("Field: values length does not match grid");
        if (!(time >= 0.0))
            throw std::invalid_argument("Field: time must be nonnegative");
    }
};

// Build a field by evaluating f at every grid point.  The arity of the
// sampler picks the dimension: f(x) needs a d = 1 grid, f(x, y) a d = 2 one.
template <class F>
Field make_field(const SpectralGrid& g, F&& f, double time = 0.0) {
    g.validate();
    Field u{g, std::vector<double>(g.size()), time};
    if constexpr (std::is_invocable_v<F&, double, double>) {
        if (g.d != 2)
            throw std::invalid_argument(
                "make_field: two-argument sampler needs a d = 2 grid");
        for (int jx = 0; jx < g.n; ++jx)
            for (int jy = 0; jy < g.n; ++jy)
                u.values[static_cast<std::size_t>(jx) * g.n + jy] =
                    f(g.coord(jx), g.coord(jy));
    } else {
        if (g.d != 1)
            throw std::invalid_argument(
                "make_field: one-argument sampler needs a d = 1 grid");
        for (int j = 0; j < g.n; ++j) u.values[j] = f(g.coord(j));
    }
    return u;
}

// Discrete approximation of the unitary continuous Fourier transform:
// hat_k = (2 pi)^{-d/2} h^d sum_j u(x_j) e^{-i xi_k . x_j}.  Since
// x_j = -L + j h and xi_k L = pi k~, the phase splits into (-1)^k times the
// plain DFT phase, which is what makes a transformed even function real.
inline std::vector<std::complex<double>> to_hat(const Field& u) {
    u.validate();
    const auto& g = u.grid;
    std::vector<std::complex<double>> hat(u.values.begin(), u.values.end());
    if (g.d == 1)
        fft_inplace(hat);
    else
        fft2_inplace(hat, static_cast<std::size_t>(g.n));
    const double scale =
        std::pow(2.0 * M_PI, -0.5 * g.d) * std::pow(g.spacing(), g.d);
    for (std::size_t k = 0; k < hat.size(); ++k) {
        const int parity = g.d == 1
                               ? static_cast<int>(k)
                               : static_cast<int>(k) / g.n + static_cast<int>(k) % g.n;
        hat[k] *= (parity & 1) ? -scale : scale;
    }
    return hat;
}

// Inverse of to_hat.  The imaginary part of the reconstruction is discarded;
// if imag_residual is non-null it receives max|Im| / max|Re| as a sanity
// measure (machine-level for Hermitian spectra).
inline Field from_hat(const SpectralGrid& g, std::vector<std::complex<double>> hat,
                      double time = 0.0, double* imag_residual = nullptr) {
    g.validate();
    if (hat.size() != g.size())
        throw std::invalid_argument("from_hat: coefficient length does not match grid");
    const double scale =
        std::pow(2.0 * M_PI, -0.5 * g.d) * std::pow(g.spacing(), g.d);
    for (std::size_t k = 0; k < hat.size(); ++k) {
        const int parity = g.d == 1
                               ? static_cast<int>(k)
                               : static_cast<int>(k) / g.n + static_cast<int>(k) % g.n;
        hat[k] /= (parity & 1) ? -scale : scale;
    }
    if (g.d == 1)
        fft_inplace(hat, /*inverse=*/true);
    else
        fft2_inplace(hat, static_cast<std::size_t>(g.n), /*inverse=*/true);
    Field u{g, std::vector<double>(g.size()), time};
    double max_re = 0.0, max_im = 0.0;
    for (std::size_t j = 0; j < hat.size(); ++j) {
        u.values[j] = hat[j].real();
        max_re = std::max(max_re, std::abs(hat[j].real()));
        max_im = std::max(max_im, std::abs(hat[j].imag()));
    }
    if (imag_residual)
        *imag_residual = max_im / (max_re > 0.0 ? max_re : 1.0);
    return u;
}

// h^d * sum u(x) |x|^order; order 0 is the total mass on the box.
inline double moment(const Field& u, double order) {
    u.validate();
    if (order < 0.0)
        throw std::invalid_argument("moment: order must be nonnegative");
    const auto& g = u.grid;
    double acc = 0.0;
    if (g.d == 1) {
        for (int j = 0; j < g.n; ++j) {
            const double r = std::abs(g.coord(j));
            acc += u.values[j] * (order == 0.0 ? 1.0 : std::pow(r, order));
        }
    } else {
        for (int jx = 0; jx < g.n; ++jx)
            for (int jy = 0; jy < g.n; ++jy) {
                const double x = g.coord(jx), y = g.coord(jy);
                const double r = std::hypot(x, y);
                acc += u.values[static_cast<std::size_t>(jx) * g.n + jy] *
                       (order == 0.0 ? 1.0 : std::pow(r, order));
            }
    }
    return acc * std::pow(g.spacing(), g.d);
}

}  // namespace fracflow::transform
