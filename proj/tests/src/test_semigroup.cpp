#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ipmlab/errors.hpp"
#include "ipmlab/fft.hpp"
#include "ipmlab/operators.hpp"
#include "ipmlab/semigroup.hpp"
#include "ipmlab/solver.hpp"

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

SpectralField band_no_tilde(int n, std::uint64_t seed) {
    SimConfig c;
    c.dimension = 2;
    c.n = n;
    c.init.kmin = 1;
    c.init.kmax = 6;
    c.init.spectrum_exponent = 6.0;
    c.init.exclude_tilde = true;
    c.init.epsilon = 1.0;
    c.init.normalize_s = 0.0;
    c.seed = seed;
    return initial_field(c);
}

} // namespace

TEST_CASE("torus propagator basics") {
    Grid g(2, 32);
    const auto f = random_field(g, 1);
    const auto same = torus_propagate(f, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(same[i] == f[i]);

    const auto sy = field_of(g, [](double, double y) { return std::sin(y); });
    const auto sy_t = torus_propagate(sy, 7.0);
    CHECK((sy_t - sy).max_abs() < 1e-15); // no horizontal content, no decay

    const auto sx = field_of(g, [](double x, double) { return std::sin(x); });
    const auto sx_t = torus_propagate(sx, 1.0);
    const auto expect = sx * std::exp(-1.0);
    CHECK((sx_t - expect).max_abs() < 1e-15 * sx.max_abs());

    CHECK_THROWS_AS(torus_propagate(f, -0.5), ConfigError);
}

TEST_CASE("torus propagator is a semigroup and a contraction") {
    Grid g(2, 32);
    const auto f = random_field(g, 2);
    const auto two_steps = torus_propagate(torus_propagate(f, 0.75), 1.5);
    const auto one_step = torus_propagate(f, 2.25);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(std::abs(two_steps[i] - one_step[i]) <= 1e-14 * (1.0 + std::abs(f[i])));

    for (double s : {0.0, 2.0, 8.0}) {
        double prev = sobolev_norm(f, s);
        for (double t : {0.5, 2.0, 10.0}) {
            const double cur = sobolev_norm(torus_propagate(f, t), s);
            CHECK(cur <= prev * (1.0 + 1e-14));
            prev = cur;
        }
    }
}

TEST_CASE("torus propagator in 3D damps by the horizontal fraction") {
    Grid g(3, 16);
    SpectralField f(g);
    f.at(1, 0, 1) = cdouble(0.5, 0.0);
    f.at(-1, 0, -1) = cdouble(0.5, 0.0);
    const auto ft = torus_propagate(f, 2.0);
    // (k1^2+k2^2)/|k|^2 = 1/2 at (1,0,1)
    CHECK(std::abs(ft.at(1, 0, 1) - 0.5 * std::exp(-1.0)) < 1e-15);
}

TEST_CASE("perturbation certificate scales with amplitude and frequency") {
    Grid g(2, 64);
    PerturbationCoefficient c1;
    c1.g = [](double y, double) { return 0.05 * std::sin(y); };
    CHECK(perturbation_certificate(c1, g, 0.0, 10.0) == doctest::Approx(0.05).epsilon(1e-10));

    PerturbationCoefficient c2;
    c2.g = [](double y, double) { return 0.05 * std::sin(2.0 * y); };
    c2.sobolev_order = 11;
    CHECK(perturbation_certificate(c2, g, 0.0, 10.0) ==
          doctest::Approx(0.05 * std::pow(2.0, 11)).epsilon(1e-9));
}

TEST_CASE("perturbed evolution with zero coefficient matches the exact semigroup") {
    const auto rho0 = band_no_tilde(64, 3);
    PerturbationCoefficient zero;
    zero.g = [](double, double) { return 0.0; };
    const auto numeric = perturbed_propagate(rho0, zero, 10.0, 0.1);
    const auto exact = torus_propagate(rho0, 10.0);
    CHECK((numeric - exact).l2_norm() < 1e-8 * rho0.l2_norm());
}

TEST_CASE("perturbed evolution rejects bad inputs") {
    Grid g(2, 32);
    const auto sy = field_of(g, [](double, double y) { return std::sin(y); });
    PerturbationCoefficient small;
    small.g = [](double y, double) { return 0.05 * std::sin(y); };
    CHECK_THROWS_AS(perturbed_propagate(sy, small, 1.0, 0.1), ConfigError); // tilde data

    const auto ok = band_no_tilde(32, 4);
    PerturbationCoefficient big;
    big.g = [](double y, double) { return 3.0 * std::sin(y); };
    big.delta = 0.05;
    CHECK_THROWS_AS(perturbed_propagate(ok, big, 1.0, 0.1), ConfigError); // certificate

    CHECK_THROWS_AS(perturbed_propagate(ok, small, -1.0, 0.1), ConfigError);
    CHECK_THROWS_AS(perturbed_propagate(ok, small, 1.0, 0.0), ConfigError);
}

TEST_CASE("perturbed scan records norms, keeps the mean, and decays in L2") {
    const auto rho0 = band_no_tilde(64, 5);
    PerturbationCoefficient coeff;
    coeff.g = [](double y, double) { return 0.05 * std::sin(y); };
    const std::vector<double> times{0.0, 1.0, 5.0, 10.0, 20.0};
    const PerturbedScan scan = perturbed_scan(rho0, coeff, 20.0, 0.25, times, {0.0, 8.0});
    REQUIRE(scan.records.size() == times.size());
    CHECK(scan.s_list.size() == 2);
    for (std::size_t i = 0; i < scan.records.size(); ++i) {
        CHECK(scan.records[i].t == doctest::Approx(times[i]));
        CHECK(scan.records[i].mean_abs < 1e-12);
        CHECK(scan.records[i].norms[0] ==
              doctest::Approx(scan.records[i].l2).epsilon(1e-12));
        if (i > 0) CHECK(scan.records[i].l2 <= scan.records[i - 1].l2 * (1.0 + 1e-13));
    }

    std::vector<double> bad{5.0, 1.0};
    CHECK_THROWS_AS(perturbed_scan(rho0, coeff, 10.0, 0.25, bad), ConfigError);
}
