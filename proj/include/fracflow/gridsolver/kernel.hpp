#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "fracflow/errors.hpp"
#include "fracflow/special/gamma.hpp"

namespace fracflow::gridsolver {

// Measurable jump kernel K(x, y) pinched between two multiples of the stable
// kernel |x - y|^{-d-beta}.  Only d = 1 is discretized here.  The envelope
// constants are what the solver's confinement and stability estimates use, so
// validate() spot-checks them against the actual callable instead of trusting
// the caller.
struct KernelSpec {
    double beta = 1.0;
    double lambda_lower = 1.0;  // lower envelope multiple
    double lambda_upper = 1.0;  // upper envelope multiple
    std::function<double(double, double)> kernel_fn;
    bool symmetric = true;

    // Samples random pairs across six decades of separation and checks the
    // envelope (and symmetry, when claimed).  Seeded, so failures reproduce.
    void validate() const {
        if (!(beta > 0.0) || !(beta < 2.0))
            throw std::invalid_argument("KernelSpec: beta must lie in (0, 2)");
        if (!(lambda_lower > 0.0) || !(lambda_lower <= lambda_upper) ||
            !std::isfinite(lambda_upper))
            throw std::invalid_argument(
                "KernelSpec: need 0 < lambda_lower <= lambda_upper < inf");
        if (!kernel_fn)
            throw std::invalid_argument("KernelSpec: kernel_fn is empty");

        std::mt19937 rng(0x4b657253u);
        std::uniform_real_distribution<double> log_sep(-3.0, 3.0);
        std::uniform_real_distribution<double> center(-10.0, 10.0);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        constexpr int kPairs = 1000;
        // Multiplicative slack so an envelope that is exactly attained does
        // not fail on rounding.
        constexpr double kSlack = 1e-9;
        for (int i = 0; i < kPairs; ++i) {
            const double sep = std::pow(10.0, log_sep(rng));
            const double x = center(rng);
            const double y = coin(rng) < 0.5 ? x + sep : x - sep;
            const double k = kernel_fn(x, y);
            const double env = std::pow(sep, -1.0 - beta);
            if (!std::isfinite(k) || k < lambda_lower * env * (1.0 - kSlack) ||
                k > lambda_upper * env * (1.0 + kSlack))
                throw KernelBoundViolation(
                    "kernel value escapes the stable envelope at separation " +
                    std::to_string(sep));
            if (symmetric) {
                const double kt = kernel_fn(y, x);
                if (std::abs(k - kt) > 1e-12 * std::max(std::abs(k), 1.0))
                    throw KernelBoundViolation(
                        "kernel marked symmetric but K(x,y) != K(y,x)");
            }
        }
    }
};

// Normalization constant of the 1-d fractional Laplacian,
//   c(1, beta) = 2^beta Gamma((1+beta)/2) / (sqrt(pi) |Gamma(-beta/2)|),
// chosen so the kernel c |x-y|^{-1-beta} has Fourier symbol |xi|^beta.
inline double stable_normalization(double beta) {
    if (!(beta > 0.0) || !(beta < 2.0))
        throw std::invalid_argument("stable_normalization: beta outside (0, 2)");
    const auto num = special::signed_log_gamma(0.5 * (1.0 + beta));
    const auto den = special::signed_log_gamma(-0.5 * beta);
    return std::exp(beta * std::log(2.0) + num.log_abs - den.log_abs -
                    0.5 * std::log(M_PI));
}

// The exact fractional-Laplacian kernel as a KernelSpec with coinciding
// envelopes.
inline KernelSpec fractional_laplacian_kernel(double beta) {
    const double c = stable_normalization(beta);
    KernelSpec spec;
    spec.beta = beta;
    spec.lambda_lower = c;
    spec.lambda_upper = c;
    spec.kernel_fn = [c, beta](double x, double y) {
        return c * std::pow(std::abs(x - y), -1.0 - beta);
    };
    spec.symmetric = true;
    return spec;
}

}  // namespace fracflow::gridsolver
