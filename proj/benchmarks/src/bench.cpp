// Microbenchmarks for the hot paths: transforms, multiplier application, the
// full right-hand side, one time step, and the two heaviest oracles. Run the
// binary directly; it is deliberately not registered with ctest.

#include "ipmlab/fft.hpp"
#include "ipmlab/field.hpp"
#include "ipmlab/grid.hpp"
#include "ipmlab/multiplier.hpp"
#include "ipmlab/operators.hpp"
#include "ipmlab/oracles.hpp"
#include "ipmlab/profile.hpp"
#include "ipmlab/solver.hpp"
#include "ipmlab/whole_space.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

namespace {

ipm::SpectralField random_field(const ipm::Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> phys(g.size());
    for (auto& v : phys) v = nd(rng);
    return ipm::transform_forward(phys, g);
}

void bm_fft_roundtrip(benchmark::State& state) {
    const int dim = int(state.range(0));
    const int n = int(state.range(1));
    ipm::Grid g(dim, n);
    ipm::Fft fft(g);
    ipm::SpectralField f = random_field(g, 7);
    std::vector<double> phys(g.size());
    for (auto _ : state) {
        fft.inverse(f, phys.data());
        fft.forward(phys.data(), f);
        benchmark::DoNotOptimize(f.data().data());
    }
}
BENCHMARK(bm_fft_roundtrip)
    ->Args({2, 64})
    ->Args({2, 128})
    ->Args({2, 256})
    ->Args({3, 16})
    ->Args({3, 32});

void bm_multiplier_apply(benchmark::State& state) {
    const int n = int(state.range(0));
    ipm::Grid g(2, n);
    ipm::SpectralField f = random_field(g, 11);
    ipm::FourierMultiplier p = ipm::horizontal_projection_sq(2);
    for (auto _ : state) {
        ipm::SpectralField out = p.apply(f);
        benchmark::DoNotOptimize(out.data().data());
    }
}
BENCHMARK(bm_multiplier_apply)->Arg(128)->Arg(256);

void bm_rhs(benchmark::State& state) {
    const int dim = int(state.range(0));
    const int n = int(state.range(1));
    ipm::Grid g(dim, n);
    ipm::SpectralField f = ipm::dealias_truncate(random_field(g, 13) * 1e-3);
    ipm::StratifiedProfile prof(1.0, {});
    for (auto _ : state) {
        ipm::SpectralField out = ipm::rhs(f, prof);
        benchmark::DoNotOptimize(out.data().data());
    }
}
BENCHMARK(bm_rhs)->Args({2, 128})->Args({2, 256})->Args({3, 32});

void bm_step(benchmark::State& state) {
    const int n = int(state.range(0));
    ipm::SimConfig cfg;
    cfg.dimension = 2;
    cfg.n = n;
    cfg.init.epsilon = 1e-3;
    ipm::validate(cfg);
    ipm::Stepper stepper(cfg);
    ipm::SimState st{0.0, 0, ipm::initial_field(cfg)};
    for (auto _ : state) {
        stepper.step_raw(st, 0.01);
        benchmark::DoNotOptimize(st.rho.data().data());
    }
}
BENCHMARK(bm_step)->Arg(128)->Arg(256);

void bm_whole_space_norm(benchmark::State& state) {
    ipm::RadialAngularSpec spec;
    spec.profile = [](double r, double) { return ipm::cdouble(std::exp(-0.5 * r * r), 0.0); };
    const double t = double(state.range(0));
    for (auto _ : state) {
        ipm::WholeSpaceNorm nrm = ipm::whole_space_norm(spec, t, ipm::AngularWeight::R1);
        benchmark::DoNotOptimize(nrm.value);
    }
}
BENCHMARK(bm_whole_space_norm)->Arg(100)->Arg(100000);

void bm_convolution_bound(benchmark::State& state) {
    const double t_max = double(state.range(0));
    for (auto _ : state) {
        ipm::ConvolutionBound b = ipm::convolution_bound(0.5, 0.5, t_max);
        benchmark::DoNotOptimize(b.sup_ratio);
    }
}
BENCHMARK(bm_convolution_bound)->Arg(10000)->Arg(1000000);

} // namespace

BENCHMARK_MAIN();
