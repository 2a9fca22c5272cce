#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fracflow::transform {

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace detail

// In-place iterative radix-2 FFT.  Forward uses the e^{-2 pi i jk/n}
// convention; the inverse includes the 1/n factor, so the two compose to
// the identity.  Accuracy is ~1e-15 relative for the sizes used here
// (<= 2^20), which is far below every tolerance downstream.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse = false) {
    const std::size_t n = a.size();
    if (!detail::is_power_of_two(n))
        throw std::invalid_argument("fft_inplace: length must be a power of two");
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= scale;
    }
}

// Two-dimensional transform of an n x n row-major array: rows, then columns.
inline void fft2_inplace(std::vector<std::complex<double>>& a, std::size_t n,
                         bool inverse = false) {
    if (a.size() != n * n)
        throw std::invalid_argument("fft2_inplace: buffer is not n*n");
    std::vector<std::complex<double>> line(n);
    for (std::size_t r = 0; r < n; ++r) {
        line.assign(a.begin() + static_cast<std::ptrdiff_t>(r * n),
                    a.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));
        fft_inplace(line, inverse);
        std::copy(line.begin(), line.end(),
                  a.begin() + static_cast<std::ptrdiff_t>(r * n));
    }
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) line[r] = a[r * n + c];
        fft_inplace(line, inverse);
        for (std::size_t r = 0; r < n; ++r) a[r * n + c] = line[r];
    }
}

}  // namespace fracflow::transform
