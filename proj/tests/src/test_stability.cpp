#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ipmlab/errors.hpp"
#include "ipmlab/fft.hpp"
#include "ipmlab/operators.hpp"
#include "ipmlab/profile.hpp"
#include "ipmlab/solver.hpp"
#include "ipmlab/stability.hpp"

#include <cmath>
#include <random>

using namespace ipm;

namespace {

SpectralField field_of(const Grid& g, double (*f)(double, double)) {
    std::vector<double> phys(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto idx = g.unflatten(i);
        phys[i] = f(g.coordinate(idx[0]), g.coordinate(idx[1]));
    }
    return transform_forward(phys, g);
}

SpectralField random_field(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    std::vector<double> phys(g.size());
    for (double& v : phys) v = dist(rng);
    return transform_forward(phys, g);
}

SpectralField band_field(int n, int kmin, int kmax, std::uint64_t seed) {
    SimConfig c;
    c.dimension = 2;
    c.n = n;
    c.init.kmin = kmin;
    c.init.kmax = kmax;
    c.init.epsilon = 1.0;
    c.init.normalize_s = 0.0;
    c.seed = seed;
    return initial_field(c);
}

} // namespace

TEST_CASE("stationarity residual") {
    Grid g(2, 32);
    const auto sy = field_of(g, [](double, double y) { return std::sin(y); });
    CHECK(stationarity_residual(sy) < 1e-13);

    // single harmonic: truncated nonlinearity annihilates it as well
    const auto sx = field_of(g, [](double x, double) { return std::sin(x); });
    CHECK(stationarity_residual(sx) < 1e-13);

    const auto mix = field_of(g, [](double x, double y) { return std::sin(x + y) + std::sin(y); });
    CHECK(stationarity_residual(mix) > 1e-3);
}

TEST_CASE("energy identity") {
    Grid g(2, 32);
    const auto sy = field_of(g, [](double, double y) { return std::sin(y); });
    auto [l0, r0] = energy_identity_check(sy);
    CHECK(std::abs(l0) < 1e-13);
    CHECK(std::abs(r0) < 1e-13);

    const auto sx = field_of(g, [](double x, double) { return std::sin(x); });
    auto [l1, r1] = energy_identity_check(sx);
    CHECK(l1 == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-12));
    CHECK(r1 == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-12));

    for (int i = 0; i < 25; ++i) {
        const auto rho = random_field(g, 300 + i);
        auto [lhs, rhs_] = energy_identity_check(rho);
        CHECK(std::abs(lhs - rhs_) <= 1e-12 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("quadratic form: pure slope collapses to K |R1 g|^2") {
    for (double K : {1.0, 2.0}) {
        StratifiedProfile profile(K, {});
        for (int i = 0; i < 20; ++i) {
            const auto g = band_field(64, 1, 8, 40 + i);
            const FormReport fr = quadratic_form(profile, g);
            CHECK(std::abs(fr.q - K * fr.r1g_sq) <= 1e-12 * std::abs(fr.q));
            CHECK(fr.hypotheses_met);
            CHECK(fr.applied == "r1");
            CHECK(fr.margin >= -1e-12 * std::abs(fr.q));
        }
    }
}

TEST_CASE("quadratic form: x-independent input gives zero form") {
    Grid g(2, 32);
    const auto sy = field_of(g, [](double, double y) { return std::sin(y) + std::cos(3 * y); });
    const FormReport fr = quadratic_form(StratifiedProfile(2.0, {1.0}), sy);
    CHECK(std::abs(fr.q) < 1e-13);
    CHECK(fr.r1g_sq < 1e-13);
    CHECK(fr.rg_sq < 1e-13);
}

TEST_CASE("quadratic form: linear plus periodic profile keeps a nonnegative margin") {
    StratifiedProfile profile(2.0, {1.0}); // 2y + sin(y)
    for (int i = 0; i < 100; ++i) {
        const auto g = band_field(64, 1, 8, 1000 + i);
        const FormReport fr = quadratic_form(profile, g);
        CHECK(fr.hyp_r_met);
        const double h1 = sobolev_norm(g, 1.0);
        CHECK(fr.margin_r >= -1e-10 * h1 * h1);
    }
}

TEST_CASE("quadratic form flags unmet hypotheses but still evaluates") {
    StratifiedProfile profile(0.5, {1.0}); // slope dips to -0.5
    const auto g = band_field(32, 1, 4, 5);
    const FormReport fr = quadratic_form(profile, g);
    CHECK_FALSE(fr.hypotheses_met);
    CHECK(fr.applied == "none");
    CHECK(std::isfinite(fr.q));
    CHECK(fr.c == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("profile conditions") {
    const ConditionReport linear = profile_conditions(StratifiedProfile());
    CHECK(linear.all());
    CHECK(linear.c == doctest::Approx(1.0));
    CHECK(linear.om3_plus_sup == doctest::Approx(0.0));

    const ConditionReport ok = profile_conditions(StratifiedProfile(2.0, {1.0}));
    CHECK(ok.all());
    CHECK(ok.c == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(ok.om3_plus_sup == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(ok.om3_plus_sup < ok.c * kPi * kPi / 2.0);

    const ConditionReport bad = profile_conditions(StratifiedProfile(0.5, {1.0}));
    CHECK_FALSE(bad.positive_slope);
    CHECK_FALSE(bad.all());

    // monotone in K: raising the slope cannot break (B) or (C)
    const ConditionReport raised = profile_conditions(StratifiedProfile(3.0, {1.0}));
    CHECK(raised.positive_slope);
    CHECK(raised.third_derivative_small);
    CHECK(raised.c > ok.c);
}

TEST_CASE("profile built from a callable is audited against it") {
    const auto good = StratifiedProfile::from_function(
        1.0, [](double y) { return 0.25 * std::sin(y) + 0.1 * std::cos(2 * y); });
    const ConditionReport rep = profile_conditions(good);
    CHECK(rep.periodic);
    CHECK(rep.reconstruction_residual < 1e-8);

    // a non-periodic callable cannot be represented by its trig interpolant
    const auto bad = StratifiedProfile::from_function(1.0, [](double y) { return 0.3 * y; });
    const ConditionReport rep2 = profile_conditions(bad);
    CHECK_FALSE(rep2.periodic);
}

TEST_CASE("profile derivative evaluators") {
    StratifiedProfile p(2.0, {1.0}); // Omega = 2y + sin y
    CHECK(p.Omega(0.5) == doctest::Approx(1.0 + std::sin(0.5)));
    CHECK(p.Omega_prime(0.5) == doctest::Approx(2.0 + std::cos(0.5)));
    CHECK(p.Omega_third(0.5) == doctest::Approx(-std::cos(0.5)));
    CHECK(p.omega_derivative(4, 0.5) == doctest::Approx(std::sin(0.5)));
    CHECK(p.describe().find("sin") != std::string::npos);
}
