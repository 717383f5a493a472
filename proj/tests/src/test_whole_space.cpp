#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ipmlab/errors.hpp"
#include "ipmlab/whole_space.hpp"

#include <cmath>

using namespace ipm;

namespace {

RadialAngularSpec gaussian_spec() {
    RadialAngularSpec spec;
    spec.profile = [](double r, double) { return cdouble(std::exp(-0.5 * r * r), 0.0); };
    return spec;
}

constexpr double kSqrtPi = 1.77245385090551603;

} // namespace

TEST_CASE("gaussian norm at t = 0 matches the closed form") {
    const auto spec = gaussian_spec();
    const WholeSpaceNorm n = whole_space_norm(spec, 0.0, AngularWeight::Identity);
    CHECK(n.converged);
    CHECK(n.value == doctest::Approx(kSqrtPi).epsilon(1e-6));
}

TEST_CASE("horizontal-symbol weight never exceeds the unweighted norm") {
    const auto spec = gaussian_spec();
    for (double t : {0.0, 1.0, 100.0}) {
        const double plain = whole_space_norm(spec, t, AngularWeight::Identity).value;
        const double r1 = whole_space_norm(spec, t, AngularWeight::R1).value;
        const double r1sq = whole_space_norm(spec, t, AngularWeight::R1Squared).value;
        CHECK(r1 <= plain * (1.0 + 1e-12));
        CHECK(r1sq <= r1 * (1.0 + 1e-12)); // cos^2 <= |cos| on the circle
    }
}

TEST_CASE("radial sharpness ratio is profile independent") {
    auto gauss = [](double r) { return std::exp(-0.5 * r * r); };
    auto bump = [](double r) { return r * r * std::exp(-0.5 * r * r); };
    CHECK(sharpness_radial(gauss, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    for (double t : {1.0, 50.0}) {
        const double a = sharpness_radial(gauss, t);
        const double b = sharpness_radial(bump, t);
        CHECK(a > 0.0);
        CHECK(std::abs(a - b) <= 1e-8 * a);
    }
}

TEST_CASE("concentrated witness stays above a uniform floor") {
    CHECK(sharpness_concentrated(0.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(sharpness_concentrated(100.0) >= 0.3);
    const double late = sharpness_concentrated(1e6);
    CHECK(late >= 0.9);
    CHECK(late <= 1.0 + 1e-9);
}

TEST_CASE("quadrature error estimates settle") {
    const auto spec = gaussian_spec();
    for (double t : {0.0, 10.0, 1e4}) {
        const WholeSpaceNorm n = whole_space_norm(spec, t, AngularWeight::R1);
        CHECK(n.converged);
        CHECK(n.error_estimate <= 1e-6);
    }
}

TEST_CASE("invalid whole-space requests are rejected") {
    auto spec = gaussian_spec();
    spec.r_max = 2.0; // outer decade still carries Gaussian mass
    CHECK_THROWS_AS(whole_space_norm(spec, 1.0, AngularWeight::Identity), ConfigError);

    RadialAngularSpec empty;
    CHECK_THROWS_AS(whole_space_norm(empty, 1.0, AngularWeight::Identity), ConfigError);

    CHECK_THROWS_AS(whole_space_norm(gaussian_spec(), -1.0, AngularWeight::Identity), ConfigError);
    CHECK_THROWS_AS(sharpness_concentrated(-2.0), ConfigError);

    auto zero = gaussian_spec();
    zero.profile = [](double, double) { return cdouble(0.0, 0.0); };
    CHECK_THROWS_AS(whole_space_norm(zero, 0.0, AngularWeight::Identity), ConfigError);
}
