#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "fracflow/errors.hpp"
#include "fracflow/kernels/fundamental.hpp"
#include "fracflow/kernels/params.hpp"
#include "fracflow/transform/fft.hpp"
#include "fracflow/transform/grid.hpp"
#include "fracflow/transform/radial.hpp"
#include "fracflow/transform/solver.hpp"

using namespace fracflow;
using namespace fracflow::transform;
using kernels::FracParams;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Field gaussian_field(const SpectralGrid& g, double sigma = 1.0) {
    if (g.d == 1)
        return make_field(
            g, [&](double x) { return std::exp(-0.5 * x * x / (sigma * sigma)); });
    return make_field(g, [&](double x, double y) {
        return std::exp(-0.5 * (x * x + y * y) / (sigma * sigma));
    });
}

// Truncated series for t^{alpha} E_{alpha, alpha+1+shift}(-lambda t^alpha),
// the mode response to forcing t^shift; independent of the library's
// Mittag-Leffler evaluator.
double volterra_series(double alpha, double lambda, double t, int shift) {
    double acc = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double term = std::pow(-lambda, k) *
                            std::pow(t, alpha * (k + 1) + shift) /
                            std::tgamma(alpha * (k + 1) + 1.0 + shift);
        acc += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(acc)) && k > 3) break;
    }
    return acc;
}

}  // namespace

TEST_CASE("fft roundtrip and analytic spot checks") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    SECTION("roundtrip, Parseval") {
        std::vector<std::complex<double>> a(64), orig;
        for (auto& x : a) x = {unif(rng), unif(rng)};
        orig = a;
        double power = 0.0;
        for (const auto& x : orig) power += std::norm(x);
        fft_inplace(a);
        double spec_power = 0.0;
        for (const auto& x : a) spec_power += std::norm(x);
        CHECK_THAT(spec_power / 64.0, WithinRel(power, 1e-12));
        fft_inplace(a, true);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(std::abs(a[i] - orig[i]) < 1e-13);
    }
    SECTION("delta transforms to a flat spectrum") {
        std::vector<std::complex<double>> a(32, 0.0);
        a[0] = 1.0;
        fft_inplace(a);
        for (const auto& x : a) CHECK(std::abs(x - 1.0) < 1e-14);
    }
    SECTION("pure mode lands in a single bin") {
        const int n = 32, m = 5;
        std::vector<std::complex<double>> a(n);
        for (int j = 0; j < n; ++j)
            a[j] = std::exp(std::complex<double>(0.0, 2.0 * M_PI * m * j / n));
        fft_inplace(a);
        for (int k = 0; k < n; ++k)
            CHECK(std::abs(a[k] - (k == m ? 32.0 : 0.0)) < 1e-12);
    }
    SECTION("two-dimensional roundtrip") {
        std::vector<std::complex<double>> a(32 * 32), orig;
        for (auto& x : a) x = {unif(rng), unif(rng)};
        orig = a;
        fft2_inplace(a, 32);
        fft2_inplace(a, 32, true);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(std::abs(a[i] - orig[i]) < 1e-12);
    }
    SECTION("non power-of-two length is rejected") {
        std::vector<std::complex<double>> a(48);
        CHECK_THROWS_AS(fft_inplace(a), std::invalid_argument);
    }
}

TEST_CASE("grid transform matches the continuous gaussian transform") {
    SECTION("one dimension") {
        SpectralGrid g{1, 256, 20.0};
        const Field u = gaussian_field(g);
        const auto hat = to_hat(u);
        // exp(-x^2/2) is its own unitary transform.
        for (int k : {0, 1, 3, 10, 25}) {
            const double xi = g.frequency(k);
            CHECK_THAT(hat[k].real(), WithinAbs(std::exp(-0.5 * xi * xi), 1e-12));
            CHECK(std::abs(hat[k].imag()) < 1e-12);
        }
        double imag = 0.0;
        const Field back = from_hat(g, hat, 0.0, &imag);
        CHECK(imag < 1e-12);
        for (int j = 0; j < g.n; j += 17)
            CHECK_THAT(back.values[j], WithinAbs(u.values[j], 1e-12));
    }
    SECTION("two dimensions") {
        SpectralGrid g{2, 64, 12.0};
        const Field u = gaussian_field(g);
        const auto hat = to_hat(u);
        for (int kx : {0, 2}) {
            for (int ky : {1, 5}) {
                const double fx = g.frequency(kx), fy = g.frequency(ky);
                CHECK_THAT(hat[static_cast<std::size_t>(kx) * g.n + ky].real(),
                           WithinAbs(std::exp(-0.5 * (fx * fx + fy * fy)), 1e-11));
            }
        }
    }
    SECTION("moments") {
        SpectralGrid g{1, 512, 25.0};
        const Field u = gaussian_field(g);
        const double root2pi = std::sqrt(2.0 * M_PI);
        CHECK_THAT(moment(u, 0.0), WithinRel(root2pi, 1e-12));
        CHECK_THAT(moment(u, 2.0), WithinRel(root2pi, 1e-10));
        CHECK_THROWS_AS(moment(u, -1.0), std::invalid_argument);

        SpectralGrid g2{2, 64, 10.0};
        CHECK_THAT(moment(gaussian_field(g2), 0.0),
                   WithinRel(2.0 * M_PI, 1e-10));
    }
    SECTION("grid validation") {
        CHECK_THROWS_AS((SpectralGrid{3, 64, 10.0}.validate()),
                        std::invalid_argument);
        CHECK_THROWS_AS((SpectralGrid{1, 48, 10.0}.validate()),
                        std::invalid_argument);
        CHECK_THROWS_AS((SpectralGrid{1, 16, 10.0}.validate()),
                        std::invalid_argument);
        CHECK_THROWS_AS((SpectralGrid{1, 64, 0.0}.validate()),
                        std::invalid_argument);
        Field f{SpectralGrid{1, 64, 10.0}, std::vector<double>(63), 0.0};
        CHECK_THROWS_AS(f.validate(), std::invalid_argument);
    }
}

TEST_CASE("homogeneous evolution reproduces the heat semigroup") {
    const FracParams prm{1.0, 2.0, 1};
    SpectralGrid g{1, 512, 30.0};
    const Field u0 = gaussian_field(g);
    const auto sol = solve_homogeneous(prm, u0, {0.5, 2.0});
    for (std::size_t i = 0; i < sol.size(); ++i) {
        const double var = 1.0 + 2.0 * sol[i].time;
        for (int j = 200; j <= 312; j += 28) {
            const double x = g.coord(j);
            const double exact = std::exp(-0.5 * x * x / var) / std::sqrt(var);
            CHECK_THAT(sol[i].values[j], WithinAbs(exact, 1e-10));
        }
    }

    SECTION("two dimensions") {
        const FracParams prm2{1.0, 2.0, 2};
        SpectralGrid g2{2, 64, 15.0};
        const auto sol2 = solve_homogeneous(prm2, gaussian_field(g2), {1.0});
        const double var = 3.0;
        for (int jx : {20, 32, 40}) {
            for (int jy : {28, 37}) {
                const double x = g2.coord(jx), y = g2.coord(jy);
                const double exact =
                    std::exp(-0.5 * (x * x + y * y) / var) / var;
                CHECK_THAT(
                    sol2[0].values[static_cast<std::size_t>(jx) * g2.n + jy],
                    WithinAbs(exact, 1e-8));
            }
        }
    }
}

TEST_CASE("homogeneous evolution agrees with the continuum fourier route") {
    // Same initial bump evolved two ways: the periodic spectral solver, and
    // direct oscillatory inversion of hat_u0 times the mode relaxation
    // factor.  Only the box truncation separates the two answers.
    const FracParams prm{0.6, 1.4, 1};
    SpectralGrid g{1, 4096, 100.0};
    const double t = 2.0;
    const auto sol = solve_homogeneous(prm, gaussian_field(g), {t});
    auto hat_exact = [&](double rho) {
        return std::sqrt(2.0 * M_PI) * kernels::z_hat(prm, t, rho) *
               std::exp(-0.5 * rho * rho);
    };
    for (int off : {8, 24, 56}) {
        const int j = g.n / 2 + off;
        const double x = g.coord(j);
        const double continuum = radial_profile_from_hat(hat_exact, 1, x);
        CHECK_THAT(sol[0].values[j], WithinRel(continuum, 1e-4));
    }
}

TEST_CASE("radial inversion returns the reference kernel values") {
    SECTION("subdiffusive kernels in d = 1, 2, 3") {
        const FracParams p1{0.6, 1.4, 1};
        auto hat1 = [&](double rho) { return kernels::z_hat(p1, 1.0, rho); };
        CHECK_THAT(radial_profile_from_hat(hat1, 1, 1.0),
                   WithinRel(0.15959535744133451, 1e-7));
        auto hat1b = [&](double rho) { return kernels::z_hat(p1, 2.0, rho); };
        CHECK_THAT(radial_profile_from_hat(hat1b, 1, 3.0),
                   WithinRel(0.042650509240773382, 1e-7));

        const FracParams p2{0.5, 1.0, 2};
        auto hat2 = [&](double rho) { return kernels::z_hat(p2, 1.0, rho); };
        CHECK_THAT(radial_profile_from_hat(hat2, 2, 1.0),
                   WithinRel(0.040798480216455996, 1e-7));

        const FracParams p3{0.4, 1.0, 3};
        auto hat3 = [&](double rho) { return kernels::y_hat(p3, 1.0, rho); };
        CHECK_THAT(radial_profile_from_hat(hat3, 3, 0.5),
                   WithinRel(0.02081630333971153, 1e-7));
    }
    SECTION("heat kernel closed form") {
        const FracParams prm{1.0, 2.0, 1};
        for (double t : {0.5, 2.0}) {
            auto hat = [&](double rho) { return kernels::z_hat(prm, t, rho); };
            for (double r : {0.4, 1.9}) {
                const double exact =
                    std::exp(-0.25 * r * r / t) / std::sqrt(4.0 * M_PI * t);
                CHECK_THAT(radial_profile_from_hat(hat, 1, r),
                           WithinRel(exact, 1e-9));
            }
        }
    }
    SECTION("domain guards") {
        auto flat = [](double) { return 1.0; };
        CHECK_THROWS_AS(radial_profile_from_hat(flat, 4, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(radial_profile_from_hat(flat, 1, 0.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(radial_profile_from_hat(flat, 1, -2.0),
                        std::invalid_argument);
    }
}

TEST_CASE("forced evolution integrates piecewise-linear forcing exactly") {
    const FracParams prm{0.6, 1.4, 1};
    SpectralGrid g{1, 64, 20.0};
    const Field zero{g, std::vector<double>(g.size(), 0.0), 0.0};
    const Field bump = gaussian_field(g);
    const auto bump_hat = to_hat(bump);
    const double t = 3.0;

    SECTION("constant-in-time forcing against the series oracle") {
        ForcingSchedule f{{0.0, 5.0}, {bump, bump}};
        const auto sol = solve_forced(prm, zero, f, {t});
        const auto hat = to_hat(sol[0]);
        for (int k = 0; k <= 8; ++k) {
            const double lambda = std::pow(std::abs(g.frequency(k)), prm.beta);
            const double expected =
                bump_hat[k].real() * volterra_series(prm.alpha, lambda, t, 0);
            CHECK_THAT(hat[k].real(), WithinAbs(expected, 1e-10));
        }
    }
    SECTION("linearly growing forcing against the series oracle") {
        Field half = bump, full = bump;
        for (auto& v : half.values) v *= 1.5;
        for (auto& v : full.values) v *= 3.0;
        half.time = 1.5;
        full.time = 3.0;
        ForcingSchedule f{{0.0, 1.5, 3.0}, {zero, half, full}};
        const auto sol = solve_forced(prm, zero, f, {t});
        const auto hat = to_hat(sol[0]);
        for (int k = 0; k <= 8; ++k) {
            const double lambda = std::pow(std::abs(g.frequency(k)), prm.beta);
            const double expected =
                bump_hat[k].real() * volterra_series(prm.alpha, lambda, t, 1);
            CHECK_THAT(hat[k].real(), WithinAbs(expected, 1e-10));
        }
    }
    SECTION("zero forcing reduces to the homogeneous solver") {
        ForcingSchedule f{{0.0, 5.0}, {zero, zero}};
        const auto forced = solve_forced(prm, bump, f, {1.0, t});
        const auto free = solve_homogeneous(prm, bump, {1.0, t});
        for (std::size_t i = 0; i < forced.size(); ++i)
            for (int j = 0; j < g.n; j += 7)
                CHECK_THAT(forced[i].values[j],
                           WithinAbs(free[i].values[j], 1e-13));
    }
}

TEST_CASE("forced evolution matches the heat duhamel closed form") {
    const FracParams prm{1.0, 2.0, 1};
    SpectralGrid g{1, 128, 15.0};
    const Field zero{g, std::vector<double>(g.size(), 0.0), 0.0};
    const Field bump = gaussian_field(g);
    const auto bump_hat = to_hat(bump);
    const double t = 1.0;

    // f(s, x) = e^{-s} g(x): every mode obeys u' = -lambda u + e^{-s} g_k
    // with the elementary solution below.
    ForcingSchedule f;
    const int m = 800;
    for (int i = 0; i <= m; ++i) {
        const double s = t * i / m;
        Field sample = bump;
        for (auto& v : sample.values) v *= std::exp(-s);
        sample.time = s;
        f.times.push_back(s);
        f.samples.push_back(sample);
    }
    const auto sol = solve_forced(prm, zero, f, {t});

    std::vector<std::complex<double>> exact_hat(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double lambda = g.frequency_sq(k);
        REQUIRE(std::abs(lambda - 1.0) > 1e-6);
        exact_hat[k] = bump_hat[k] * (std::exp(-t) - std::exp(-lambda * t)) /
                       (lambda - 1.0);
    }
    const Field exact = from_hat(g, exact_hat, t);
    double peak = 0.0;
    for (double v : exact.values) peak = std::max(peak, std::abs(v));
    for (int j = 0; j < g.n; j += 5)
        CHECK_THAT(sol[0].values[j], WithinAbs(exact.values[j], 1e-6 * peak));
}

TEST_CASE("mass tracks the memory integral of the forcing") {
    const FracParams prm{0.5, 1.0, 1};
    SpectralGrid g{1, 256, 40.0};
    const Field u0 = gaussian_field(g);
    const double mass0 = moment(u0, 0.0);

    SECTION("free evolution conserves mass") {
        const auto sol = solve_homogeneous(prm, u0, {0.5, 2.0, 7.0});
        for (const auto& s : sol)
            CHECK_THAT(moment(s, 0.0), WithinRel(mass0, 1e-10));
    }
    SECTION("static forcing adds mass like t^alpha") {
        ForcingSchedule f{{0.0, 4.0}, {u0, u0}};
        const auto sol = solve_forced(prm, u0, f, {1.0, 3.0});
        for (const auto& s : sol) {
            const double gain = mass0 * std::pow(s.time, prm.alpha) /
                                std::tgamma(prm.alpha + 1.0);
            CHECK_THAT(moment(s, 0.0), WithinRel(mass0 + gain, 1e-9));
        }
    }
}

TEST_CASE("solver guards flag unusable configurations") {
    const FracParams prm{0.5, 1.0, 1};

    SECTION("box too small for the requested horizon") {
        SpectralGrid g{1, 64, 30.0};
        CHECK_THROWS_AS(solve_homogeneous(prm, gaussian_field(g), {100.0}),
                        GridTooCoarse);
    }
    SECTION("aliased slow spectrum is refused, and the gate can be waived") {
        SpectralGrid g{1, 64, 20.0};
        Field spike{g, std::vector<double>(g.size(), 0.0), 0.0};
        spike.values[g.n / 2] = 1.0 / g.spacing();
        CHECK_THROWS_AS(solve_homogeneous(prm, spike, {0.5}), GridTooCoarse);
        SolveOptions opt;
        opt.check_resolution = false;
        CHECK_NOTHROW(solve_homogeneous(prm, spike, {0.5}, opt));
    }
    SECTION("delta data under the heat flow is already resolved") {
        const FracParams heat{1.0, 2.0, 1};
        SpectralGrid g{1, 64, 20.0};
        Field spike{g, std::vector<double>(g.size(), 0.0), 0.0};
        spike.values[g.n / 2] = 1.0 / g.spacing();
        const auto sol = solve_homogeneous(heat, spike, {0.5});
        for (int off : {0, 3}) {
            const int j = g.n / 2 + off;
            const double r = g.coord(j);  // relative to the spike at x = 0
            CHECK_THAT(sol[0].values[j],
                       WithinRel(std::exp(-0.25 * r * r / 0.5) /
                                     std::sqrt(4.0 * M_PI * 0.5),
                                 1e-5));
        }
    }
    SECTION("time list validation") {
        SpectralGrid g{1, 64, 20.0};
        const Field u0 = gaussian_field(g);
        CHECK_THROWS_AS(solve_homogeneous(prm, u0, {}), std::invalid_argument);
        CHECK_THROWS_AS(solve_homogeneous(prm, u0, {1.0, 0.5}),
                        std::invalid_argument);
        CHECK_THROWS_AS(solve_homogeneous(prm, u0, {0.0, 1.0}),
                        std::invalid_argument);
    }
    SECTION("schedule validation") {
        SpectralGrid g{1, 64, 20.0};
        const Field u0 = gaussian_field(g);
        ForcingSchedule late{{1.0, 2.0}, {u0, u0}};
        CHECK_THROWS_AS(solve_forced(prm, u0, late, {1.5}),
                        std::invalid_argument);
        ForcingSchedule shortish{{0.0, 1.0}, {u0, u0}};
        CHECK_THROWS_AS(solve_forced(prm, u0, shortish, {2.0}),
                        std::invalid_argument);
    }
    SECTION("coarsely sampled fast forcing trips the refinement probe") {
        SpectralGrid g{1, 64, 20.0};
        const Field zero{g, std::vector<double>(g.size(), 0.0), 0.0};
        const Field bump = gaussian_field(g);
        ForcingSchedule f;
        for (int i = 0; i <= 6; ++i) {
            const double s = 0.5 * i;
            Field sample = bump;
            for (auto& v : sample.values) v *= std::exp(-10.0 * s);
            sample.time = s;
            f.times.push_back(s);
            f.samples.push_back(sample);
        }
        CHECK_THROWS_AS(solve_forced(prm, zero, f, {3.0}),
                        QuadratureUnderResolved);
    }
}

TEST_CASE("residual is small for exact solutions and flags corruption") {
    const FracParams prm{0.6, 1.4, 1};
    SpectralGrid g{1, 64, 25.0};
    const Field u0 = gaussian_field(g);
    const double horizon = 4.0;

    auto snapshots = [&](int steps) {
        std::vector<double> times;
        for (int i = 1; i <= steps; ++i) times.push_back(horizon * i / steps);
        auto sol = solve_homogeneous(prm, u0, times);
        std::vector<Field> full{u0};
        full.front().time = 0.0;
        for (auto& s : sol) full.push_back(std::move(s));
        return full;
    };

    SECTION("first-order decay under step halving") {
        const double coarse = residual(prm, snapshots(40));
        const double fine = residual(prm, snapshots(80));
        CHECK(coarse < 0.05);
        CHECK(fine < coarse);
        CHECK(coarse / fine > 1.6);  // close to the ideal factor 2
    }
    SECTION("zero field has zero residual") {
        std::vector<Field> fields;
        for (int i = 0; i < 8; ++i)
            fields.push_back(
                Field{g, std::vector<double>(g.size(), 0.0), 0.5 * i});
        CHECK(residual(prm, fields) == 0.0);
    }
    SECTION("perturbing one snapshot raises the residual") {
        // Fine steps keep the clean baseline low; the noisy snapshot sits in
        // the window the sup ranges over.
        auto clean = snapshots(160);
        const double base = residual(prm, clean);
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> unif(-1e-3, 1e-3);
        for (auto& v : clean[120].values) v += unif(rng);
        CHECK(residual(prm, clean) > 3.0 * base);
    }
    SECTION("forced snapshots satisfy the forced equation") {
        const Field zero{g, std::vector<double>(g.size(), 0.0), 0.0};
        ForcingSchedule f{{0.0, horizon}, {u0, u0}};
        std::vector<double> times;
        for (int i = 1; i <= 60; ++i) times.push_back(horizon * i / 60);
        auto sol = solve_forced(prm, zero, f, times);
        std::vector<Field> full{zero};
        for (auto& s : sol) full.push_back(std::move(s));
        const double with_f = residual(prm, full, &f);
        CHECK(with_f < 0.05);
        // Dropping the forcing term must leave a visible defect.
        CHECK(residual(prm, full) > 10.0 * with_f);
    }
    SECTION("input validation") {
        auto few = snapshots(5);
        CHECK_THROWS_AS(residual(prm, few), std::invalid_argument);
        auto shifted = snapshots(40);
        shifted[3].time += 0.01;
        CHECK_THROWS_AS(residual(prm, shifted), std::invalid_argument);
    }
}
