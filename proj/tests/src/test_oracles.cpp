#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ipmlab/errors.hpp"
#include "ipmlab/fit.hpp"
#include "ipmlab/oracles.hpp"
#include "ipmlab/quadrature.hpp"

#include <cmath>

using namespace ipm;

TEST_CASE("gauss-legendre panels integrate polynomials exactly") {
    // order-n rule is exact through degree 2n-1
    const double cubic = gl_panel([](double x) { return x * x * x + x * x; }, -1.0, 2.0, 4);
    CHECK(cubic == doctest::Approx(15.0 / 4.0 + 3.0).epsilon(1e-14));
    const auto r = adaptive_integrate([](double x) { return std::exp(-x * x); }, -6.0, 6.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::sqrt(3.14159265358979324)).epsilon(1e-10));
}

TEST_CASE("angular integral endpoints and Laplace rate") {
    CHECK(angular_integral(0, 0.0) == doctest::Approx(2.0 * 3.14159265358979324).epsilon(1e-9));
    CHECK(angular_integral(2, 0.0) == doctest::Approx(3.14159265358979324).epsilon(1e-9));

    // value * t^{1/2} approaches 2 Gamma(1/2) = 2 sqrt(pi)
    const double t = 1e6;
    const double scaled = angular_integral(0, t) * std::sqrt(t);
    CHECK(std::abs(scaled - 2.0 * std::sqrt(3.14159265358979324)) <
          0.05 * 2.0 * std::sqrt(3.14159265358979324));

    // decreasing in t and in k
    double prev = angular_integral(1, 1.0);
    for (double tt : {10.0, 100.0, 1000.0}) {
        const double cur = angular_integral(1, tt);
        CHECK(cur < prev);
        prev = cur;
    }
    for (double tt : {0.0, 1.0, 50.0})
        CHECK(angular_integral(2, tt) <= angular_integral(1, tt) + 1e-12);

    CHECK_THROWS_AS(angular_integral(-1, 1.0), ConfigError);
    CHECK_THROWS_AS(angular_integral(0, -1.0), ConfigError);
}

TEST_CASE("pointwise bound constants") {
    const PointwiseBound c1 = pointwise_bound_constant(1, 1e3);
    const PointwiseBound c2 = pointwise_bound_constant(2, 1e3);
    const PointwiseBound c3 = pointwise_bound_constant(3, 1e3);
    // the boundary value A = 1, t = 0 already gives 1; k = 3 has an interior max
    CHECK(c1.constant == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(c2.constant == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(c3.constant > 1.05);
    CHECK(c3.constant < 1.2);

    const PointwiseBound far = pointwise_bound_constant(2, 1e6);
    CHECK(std::abs(far.constant - c2.constant) <= 0.01 * c2.constant);

    CHECK_THROWS_AS(pointwise_bound_constant(0, 1.0), ConfigError);
}

TEST_CASE("convolution bound is finite, monotone in horizon, zero at t_max = 0") {
    const ConvolutionBound zero = convolution_bound(0.25, 0.25, 0.0);
    CHECK(zero.sup_ratio == doctest::Approx(0.0));

    const ConvolutionBound a = convolution_bound(0.25, 0.25, 1e3);
    const ConvolutionBound b = convolution_bound(0.25, 0.25, 1e4);
    CHECK(std::isfinite(a.sup_ratio));
    CHECK(a.sup_ratio > 0.0);
    CHECK(b.sup_ratio >= a.sup_ratio - 1e-12);

    const ConvolutionBound logcase = convolution_bound(1.0, 0.5, 1e4);
    CHECK(std::isfinite(logcase.sup_ratio));

    CHECK_THROWS_AS(convolution_bound(0.0, 0.5, 1.0), ConfigError);
    CHECK_THROWS_AS(convolution_bound(0.5, -1.0, 1.0), ConfigError);
}

TEST_CASE("gronwall ode against the closed form") {
    // A = 0: f(t) = f0 exp(2 - 2 sqrt(t+1))
    const GronwallResult r = gronwall_ode(1.0, 0.0, 1e4);
    double worst = 0.0;
    for (const auto& [t, f] : r.trajectory)
        worst = std::max(worst, std::abs(f - std::exp(2.0 - 2.0 * std::sqrt(t + 1.0))));
    CHECK(worst < 1e-8);
    // stated-order ratio peaks at sqrt(t+1) = 5/2: value (5/2)^5 e^{-3}
    const double peak = std::pow(2.5, 5.0) * std::exp(-3.0);
    CHECK(r.sup_ratio_stated == doctest::Approx(peak).epsilon(1e-3));
    CHECK(r.arg_t_stated == doctest::Approx(5.25).epsilon(0.02));

    const GronwallResult zero = gronwall_ode(0.0, 0.0, 10.0);
    for (const auto& [t, f] : zero.trajectory) {
        (void)t;
        CHECK(f == 0.0);
    }

    // A > 0: the advertised (t+1)^{5/2} ratio keeps growing, the (t+1)^2 one saturates
    const GronwallResult g1 = gronwall_ode(1.0, 1.0, 1e3);
    const GronwallResult g2 = gronwall_ode(1.0, 1.0, 1e4);
    CHECK(g2.sup_ratio_stated > 2.0 * g1.sup_ratio_stated);
    const GronwallResult g3 = gronwall_ode(1.0, 1.0, 1e5);
    CHECK(std::abs(g3.sup_ratio_observed - g2.sup_ratio_observed) <=
          0.02 * g2.sup_ratio_observed);

    CHECK_THROWS_AS(gronwall_ode(-1.0, 0.0, 10.0), ConfigError);
}

TEST_CASE("power-law fitting") {
    std::vector<std::pair<double, double>> quarter, five;
    for (int i = 0; i <= 40; ++i) {
        const double t = std::exp(std::log(10.0) + (std::log(1e4) - std::log(10.0)) * i / 40.0);
        quarter.emplace_back(t, std::pow(t + 1.0, -0.25));
        five.emplace_back(t, 5.0 * std::pow(t + 1.0, -1.25));
    }
    const DecayFit f1 = fit_power_law(quarter, 10.0, 1e4);
    CHECK(f1.exponent == doctest::Approx(-0.25).epsilon(1e-6));
    CHECK(f1.r_squared > 0.999999);

    const DecayFit f2 = fit_power_law(five, 10.0, 1e4);
    CHECK(f2.exponent == doctest::Approx(-1.25).epsilon(1e-6));
    CHECK(f2.constant == doctest::Approx(5.0).epsilon(1e-4));

    CHECK_THROWS_AS(fit_power_law(quarter, 10.0, 11.0), ConfigError); // < 8 samples

    auto bad = quarter;
    bad[5].second = 0.0;
    bad[6].second = -1.0;
    try {
        fit_power_law(bad, 10.0, 1e4);
        CHECK(false);
    } catch (const FitError& e) {
        CHECK(e.offending.size() == 2);
        CHECK(e.offending[0] == 5);
        CHECK(e.offending[1] == 6);
    }
}
