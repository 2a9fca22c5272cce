#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "fracflow/special/frac_calc.hpp"
#include "fracflow/special/gamma.hpp"

using namespace fracflow::special;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("gl_weights recurrence and sign pattern", "[fraccalc]") {
    const double a = 0.6;
    const auto w = gl_weights(a, 50);
    REQUIRE(w.size() == 51);
    CHECK(w[0] == 1.0);
    CHECK_THAT(w[1], WithinRel(-a, 1e-15));
    CHECK_THAT(w[2], WithinRel(-a * (1.0 - a) / 2.0, 1e-14));
    // For alpha in (0,1): negative weights after the first, positive partial sums.
    double partial = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k >= 1)
            CHECK(w[k] < 0.0);
        partial += w[k];
        CHECK(partial > 0.0);
    }
    // Direct formula w_k = Gamma(k-a) / (Gamma(-a) Gamma(k+1)) at k = 5.
    const auto num = signed_log_gamma(5.0 - a);
    const auto den = signed_log_gamma(-a);
    const double expected =
        num.sign * den.sign * std::exp(num.log_abs - den.log_abs - log_gamma(6.0));
    CHECK_THAT(w[5], WithinRel(expected, 1e-12));
}

TEST_CASE("fractional integral is exact on constants", "[fraccalc]") {
    const double a = 0.7;
    SampledSignal f;
    f.dt = 0.01;
    f.values.assign(301, 2.5);
    const auto J = rl_integral(f, a);
    for (std::size_t i : {1ul, 10ul, 100ul, 300ul}) {
        const double t = f.dt * static_cast<double>(i);
        const double exact = 2.5 * std::pow(t, a) / std::tgamma(a + 1.0);
        CHECK_THAT(J.values[i], WithinRel(exact, 1e-12));
    }
}

TEST_CASE("fractional integral of a power matches the closed form", "[fraccalc]") {
    // J^a t^2 = Gamma(3)/Gamma(3+a) t^{2+a}
    const double a = 0.45;
    SampledSignal f;
    f.dt = 1.0 / 512.0;
    f.values.resize(513);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double t = f.dt * static_cast<double>(i);
        f.values[i] = t * t;
    }
    const auto J = rl_integral(f, a);
    const double exact = 2.0 / std::tgamma(3.0 + a); // at t = 1
    CHECK_THAT(J.values.back(), WithinRel(exact, 1e-5));
}

TEST_CASE("fractional derivative of a power matches the closed form", "[fraccalc]") {
    // D^a t^2 = Gamma(3)/Gamma(3-a) t^{2-a}
    const double a = 0.5;
    SampledSignal f;
    f.dt = 1.0 / 2048.0;
    f.values.resize(2049);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double t = f.dt * static_cast<double>(i);
        f.values[i] = t * t;
    }
    const auto D = rl_derivative(f, a);
    const double exact = 2.0 / std::tgamma(3.0 - a); // at t = 1
    CHECK_THAT(D.values.back(), WithinRel(exact, 2e-3));
}

TEST_CASE("derivative undoes the integral on smooth data", "[fraccalc]") {
    const double a = 0.35;
    SampledSignal f;
    f.dt = 1.0 / 1024.0;
    f.values.resize(1025);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double t = f.dt * static_cast<double>(i);
        f.values[i] = std::sin(3.0 * t) + t;
    }
    const auto round = rl_derivative(rl_integral(f, a), a);
    // compare away from the startup region
    for (std::size_t i = 200; i < f.values.size(); i += 100) {
        CHECK_THAT(round.values[i], WithinAbs(f.values[i], 5e-3));
    }
}

TEST_CASE("order zero is the identity", "[fraccalc]") {
    SampledSignal f;
    f.dt = 0.1;
    f.values = {1.0, -2.0, 3.0, 0.5};
    CHECK(rl_integral(f, 0.0).values == f.values);
    CHECK(rl_derivative(f, 0.0).values == f.values);
}

TEST_CASE("input validation", "[fraccalc]") {
    SampledSignal bad;
    bad.dt = 0.1;
    bad.values = {1.0};
    CHECK_THROWS_AS(rl_integral(bad, 0.5), std::invalid_argument);
    SampledSignal two;
    two.dt = 0.1;
    two.values = {1.0, 2.0};
    CHECK_THROWS_AS(rl_derivative(two, 0.5), std::invalid_argument);
    SampledSignal ok;
    ok.dt = -1.0;
    ok.values = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(rl_integral(ok, 0.5), std::invalid_argument);
    ok.dt = 1.0;
    CHECK_THROWS_AS(rl_derivative(ok, 1.5), std::invalid_argument);
}
