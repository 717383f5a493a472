#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ipmlab/errors.hpp"
#include "ipmlab/fft.hpp"
#include "ipmlab/field.hpp"
#include "ipmlab/grid.hpp"
#include "ipmlab/multiplier.hpp"
#include "ipmlab/operators.hpp"

#include <cmath>
#include <random>

using namespace ipm;

namespace {

std::vector<double> sample(const Grid& g, double (*f)(double, double, double)) {
    std::vector<double> phys(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto idx = g.unflatten(i);
        const double x = g.coordinate(idx[0]);
        const double y = g.coordinate(idx[1]);
        const double z = g.dimension() == 3 ? g.coordinate(idx[2]) : 0.0;
        phys[i] = f(x, y, z);
    }
    return phys;
}

SpectralField field_of(const Grid& g, double (*f)(double, double, double)) {
    return transform_forward(sample(g, f), g);
}

SpectralField random_field(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    std::vector<double> phys(g.size());
    for (double& v : phys) v = dist(rng);
    return transform_forward(phys, g);
}

} // namespace

TEST_CASE("grid index round trips") {
    Grid g(2, 16);
    CHECK(g.size() == 256);
    CHECK(g.spacing() == doctest::Approx(kTwoPi / 16));
    CHECK(g.coordinate(0) == doctest::Approx(-kPi));
    for (int i = 0; i < 16; ++i) CHECK(g.index_of(g.wavenumber(i)) == i);
    CHECK(g.wavenumber(8) == -8); // Nyquist sits at index N/2
    for (std::size_t f = 0; f < g.size(); f += 17) CHECK(g.flatten(g.unflatten(f)) == f);

    Grid g3(3, 8);
    CHECK(g3.size() == 512);
    const auto w = g3.wavevector(g3.flatten({1, 2, 7}));
    CHECK(w[0] == 1);
    CHECK(w[1] == 2);
    CHECK(w[2] == -1);
}

TEST_CASE("grid rejects bad shapes") {
    CHECK_THROWS_AS(Grid(4, 16), ConfigError);
    CHECK_THROWS_AS(Grid(2, 100), ConfigError);
    CHECK_THROWS_AS(Grid(2, 4), ConfigError);
}

TEST_CASE("transform of constant and single modes") {
    Grid g(2, 32);
    const auto one = field_of(g, [](double, double, double) { return 1.0; });
    for (std::size_t i = 0; i < one.size(); ++i) {
        if (i == g.flatten({0, 0, 0}))
            CHECK(std::abs(one[i] - cdouble(kTwoPi, 0.0)) < 1e-12);
        else
            CHECK(std::abs(one[i]) < 1e-13);
    }
    CHECK(std::abs(mean_value(one) - 1.0) < 1e-13);

    const auto sx = field_of(g, [](double x, double, double) { return std::sin(x); });
    for (std::size_t i = 0; i < sx.size(); ++i) {
        const auto k = g.wavevector(i);
        if (std::abs(k[0]) == 1 && k[1] == 0)
            CHECK(std::abs(sx[i]) == doctest::Approx(kPi).epsilon(1e-12));
        else
            CHECK(std::abs(sx[i]) < 1e-12);
    }
}

TEST_CASE("transform round trip and Parseval") {
    for (int dim : {2, 3}) {
        Grid g(dim, dim == 2 ? 32 : 16);
        const int fields = dim == 2 ? 100 : 20;
        for (int i = 0; i < fields; ++i) {
            const auto phys = sample(g, [](double, double, double) { return 0.0; });
            (void)phys;
            std::mt19937_64 rng(1000 + i);
            std::normal_distribution<double> dist;
            std::vector<double> p(g.size());
            for (double& v : p) v = dist(rng);
            const auto f = transform_forward(p, g);
            CHECK(f.hermitian_defect() < 1e-12 * f.l2_norm());

            const auto back = transform_inverse(f);
            double diff = 0.0, ref = 0.0;
            for (std::size_t j = 0; j < p.size(); ++j) {
                diff += (back[j] - p[j]) * (back[j] - p[j]);
                ref += p[j] * p[j];
            }
            CHECK(std::sqrt(diff / ref) < 1e-12);

            const double spectral = f.l2_norm();
            const double physical = l2_norm_physical(p, g);
            CHECK(std::abs(spectral - physical) < 1e-12 * physical);
        }
    }
}

TEST_CASE("transform rejects shape mismatch") {
    Grid g(2, 16);
    CHECK_THROWS_AS(transform_forward(std::vector<double>(100, 0.0), g), ConfigError);
}

TEST_CASE("multipliers: identity, riesz examples, linearity, non-finite symbol") {
    Grid g(2, 32);
    const auto f = random_field(g, 7);

    const auto same = identity_multiplier().apply(f);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(same[i] == f[i]);

    const auto sy = field_of(g, [](double, double y, double) { return std::sin(y); });
    const auto r1sy = riesz(0).apply(sy);
    CHECK(r1sy.l2_norm() < 1e-13);

    const auto sx = field_of(g, [](double x, double, double) { return std::sin(x); });
    const auto r1r1sx = riesz(0).apply(riesz(0).apply(sx));
    CHECK((r1r1sx + sx).l2_norm() < 1e-12 * sx.l2_norm()); // R1^2 sin x = -sin x

    const auto a = random_field(g, 8);
    const auto m = lambda_power(1.5);
    const auto lin = m.apply(a + 2.0 * f) - (m.apply(a) + 2.0 * m.apply(f));
    CHECK(lin.max_abs() < 1e-13 * (a.l2_norm() + f.l2_norm()));

    FourierMultiplier bad([](const KVec& k) { return cdouble(1.0 / (k.norm2() - 2.0), 0.0); },
                          0.0, "pole");
    CHECK_THROWS_AS(bad.apply(f), NumericError);
}

TEST_CASE("sobolev norm examples and monotonicity") {
    Grid g(2, 32);
    SpectralField zero(g);
    CHECK(sobolev_norm(zero, 0.0) == 0.0);
    CHECK(sobolev_norm(zero, 7.5) == 0.0);

    const auto sx = field_of(g, [](double x, double, double) { return std::sin(x); });
    const double l2 = std::sqrt(2.0 * kPi * kPi);
    CHECK(sobolev_norm(sx, 0.0) == doctest::Approx(l2).epsilon(1e-12));
    CHECK(sobolev_norm(sx, 1.0) == doctest::Approx(std::sqrt(2.0) * l2).epsilon(1e-12));
    CHECK(sobolev_norm(sx, 0.0) == doctest::Approx(sx.l2_norm()).epsilon(1e-13));

    const auto f = random_field(g, 9);
    double prev = sobolev_norm(f, 0.0);
    for (double s : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double cur = sobolev_norm(f, s);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("2d velocity law") {
    Grid g(2, 32);
    const auto gy = field_of(g, [](double, double y, double) { return std::sin(y) + 0.3 * std::cos(2 * y); });
    auto [v1, v2] = velocity_from_density_2d(gy);
    CHECK(v1.l2_norm() < 1e-13);
    CHECK(v2.l2_norm() < 1e-13);

    const auto sx = field_of(g, [](double x, double, double) { return std::sin(x); });
    auto [u1, u2] = velocity_from_density_2d(sx);
    CHECK(u1.l2_norm() < 1e-13);
    CHECK((u2 - sx).l2_norm() < 1e-12 * sx.l2_norm());

    const auto cxy = field_of(g, [](double x, double y, double) { return std::cos(x + y); });
    auto [w1, w2] = velocity_from_density_2d(cxy);
    CHECK((w1 + 0.5 * cxy).l2_norm() < 1e-12 * cxy.l2_norm());
    CHECK((w2 - 0.5 * cxy).l2_norm() < 1e-12 * cxy.l2_norm());

    for (int i = 0; i < 20; ++i) {
        const auto rho = random_field(g, 100 + i);
        auto [a1, a2] = velocity_from_density_2d(rho);
        CHECK(divergence_defect_2d(a1, a2) < 1e-13 * rho.l2_norm());
        CHECK(std::abs(a1[g.flatten({0, 0, 0})]) == 0.0);
        // interpolation identity: |u1|^2 <= |rho| |u2|
        CHECK(a1.l2_norm() * a1.l2_norm() <=
              rho.l2_norm() * a2.l2_norm() + 1e-12 * rho.l2_norm() * rho.l2_norm());
    }
}

TEST_CASE("3d velocity law") {
    Grid g(3, 16);
    const auto gz = field_of(g, [](double, double, double z) { return std::sin(z); });
    auto u = velocity_from_density_3d(gz);
    CHECK(u[0].l2_norm() < 1e-13);
    CHECK(u[1].l2_norm() < 1e-13);
    CHECK(u[2].l2_norm() < 1e-13);

    const auto sx = field_of(g, [](double x, double, double) { return std::sin(x); });
    auto v = velocity_from_density_3d(sx);
    CHECK(v[0].l2_norm() < 1e-13);
    CHECK(v[1].l2_norm() < 1e-13);
    CHECK((v[2] - sx).l2_norm() < 1e-12 * sx.l2_norm());

    const auto cxz = field_of(g, [](double x, double, double z) { return std::cos(x + z); });
    auto w = velocity_from_density_3d(cxz);
    CHECK((w[0] + 0.5 * cxz).l2_norm() < 1e-12 * cxz.l2_norm());
    CHECK(w[1].l2_norm() < 1e-13);
    CHECK((w[2] - 0.5 * cxz).l2_norm() < 1e-12 * cxz.l2_norm());

    for (int i = 0; i < 10; ++i) {
        const auto rho = random_field(g, 200 + i);
        auto a = velocity_from_density_3d(rho);
        CHECK(divergence_defect_3d(a[0], a[1], a[2]) < 1e-13 * rho.l2_norm());
    }
}

TEST_CASE("bar/tilde split") {
    Grid g(2, 32);
    const auto sy = field_of(g, [](double, double y, double) { return std::sin(y); });
    const auto sxy = field_of(g, [](double x, double y, double) { return std::sin(x + y); });
    const auto both = sy + sxy;

    auto [b1, t1] = bar_tilde_split(sy);
    CHECK(b1.l2_norm() < 1e-13);
    CHECK((t1 - sy).l2_norm() < 1e-13);

    auto [b2, t2] = bar_tilde_split(sxy);
    CHECK((b2 - sxy).l2_norm() < 1e-13);
    CHECK(t2.l2_norm() < 1e-13);

    auto [b3, t3] = bar_tilde_split(both);
    CHECK((b3 - sxy).l2_norm() < 1e-13);
    CHECK((t3 - sy).l2_norm() < 1e-13);
    CHECK(((b3 + t3) - both).max_abs() == 0.0); // exact split

    for (std::size_t i = 0; i < t3.size(); ++i)
        if (g.wavevector(i)[0] != 0) CHECK(std::abs(t3[i]) == 0.0);
}

TEST_CASE("gradient sup norm") {
    Grid g(2, 32);
    const auto one = field_of(g, [](double, double, double) { return 4.2; });
    CHECK(grad_linf(one) < 1e-12);
    const auto sx = field_of(g, [](double x, double, double) { return std::sin(x); });
    CHECK(grad_linf(sx) == doctest::Approx(1.0).epsilon(1e-12));
    const auto s2y = field_of(g, [](double, double y, double) { return std::sin(2 * y); });
    CHECK(grad_linf(s2y) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("dealias truncation") {
    Grid g(2, 32); // band limit floor(32/3) = 10
    auto f = random_field(g, 11);
    const auto cut = dealias_truncate(f);
    for (std::size_t i = 0; i < cut.size(); ++i) {
        const auto k = g.wavevector(i);
        const bool outside = std::abs(k[0]) > 10 || std::abs(k[1]) > 10;
        if (outside)
            CHECK(std::abs(cut[i]) == 0.0);
        else
            CHECK(cut[i] == f[i]);
    }
}

TEST_CASE("field access and wavenumber bounds") {
    Grid g(2, 16);
    SpectralField f(g);
    f.at(3, -2) = cdouble(1.0, 2.0);
    CHECK(f[g.flatten({g.index_of(3), g.index_of(-2), 0})] == cdouble(1.0, 2.0));
    CHECK_THROWS_AS(f.at(9, 0), ConfigError);  // outside [-8, 8)
    CHECK_THROWS_AS(f.at(0, 0, 1), ConfigError); // 2D has no third axis
}
