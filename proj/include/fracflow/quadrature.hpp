#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace fracflow::quad {

// 16-point Gauss-Legendre rule on [-1, 1], tabulated as the positive
// abscissae; used with both signs.
inline constexpr std::array<double, 8> kGl16Nodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGl16Weights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

template <class F>
double gauss16(F&& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t i = 0; i < kGl16Nodes.size(); ++i)
        acc += kGl16Weights[i] *
               (f(mid - half * kGl16Nodes[i]) + f(mid + half * kGl16Nodes[i]));
    return half * acc;
}

// One panel, bisected until the fixed-order rule agrees with its own
// refinement.  The tolerance is absolute and is halved per split so the
// budget over a fully refined panel stays bounded by roughly 2*tol.
template <class F>
double adaptive_panel(F& f, double lo, double hi, double tol, int depth = 12) {
    const double whole = gauss16(f, lo, hi);
    const double mid = 0.5 * (lo + hi);
    const double split = gauss16(f, lo, mid) + gauss16(f, mid, hi);
    if (std::abs(whole - split) <= tol || depth <= 0) return split;
    return adaptive_panel(f, lo, mid, 0.5 * tol, depth - 1) +
           adaptive_panel(f, mid, hi, 0.5 * tol, depth - 1);
}

}  // namespace fracflow::quad
