#include "ipmlab/fft.hpp"

#include "ipmlab/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace ipm {

namespace {

// FFTW's planner mutates global state; all plan creation/destruction is
// serialized on this mutex. Execution on distinct plans is thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

double parseval_scale(const Grid& g) {
    // c(k) = (2*pi)^{d/2}/N^d * DFT(f)(k)
    return std::pow(kTwoPi, 0.5 * g.dimension()) / static_cast<double>(g.size());
}

} // namespace

struct Fft::Impl {
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    explicit Impl(const Grid& g) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        buf = fftw_alloc_complex(g.size());
        if (!buf) throw NumericError("fftw_alloc_complex failed");
        const int n = g.n();
        if (g.dimension() == 2) {
            fwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        } else {
            fwd = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        if (!fwd || !bwd) throw NumericError("fftw plan creation failed");
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf) fftw_free(buf);
    }
};

Fft::Fft(const Grid& g) : grid_(g), impl_(std::make_unique<Impl>(g)) {}

Fft::~Fft() = default;

void Fft::forward(const double* phys, SpectralField& out) {
    const std::size_t m = grid_.size();
    for (std::size_t i = 0; i < m; ++i) {
        impl_->buf[i][0] = phys[i];
        impl_->buf[i][1] = 0.0;
    }
    fftw_execute(impl_->fwd);
    if (!(out.grid() == grid_)) out = SpectralField(grid_);
    const double s = parseval_scale(grid_);
    for (std::size_t i = 0; i < m; ++i)
        out[i] = cdouble(impl_->buf[i][0] * s, impl_->buf[i][1] * s);
}

void Fft::inverse(const SpectralField& in, double* phys) {
    if (!(in.grid() == grid_)) throw ConfigError("Fft::inverse: field grid mismatch");
    const std::size_t m = grid_.size();
    for (std::size_t i = 0; i < m; ++i) {
        impl_->buf[i][0] = in[i].real();
        impl_->buf[i][1] = in[i].imag();
    }
    fftw_execute(impl_->bwd);
    // f = IDFT-sum(c)/(2*pi)^{d/2}; the imaginary residue is discarded.
    const double s = 1.0 / std::pow(kTwoPi, 0.5 * grid_.dimension());
    for (std::size_t i = 0; i < m; ++i) phys[i] = impl_->buf[i][0] * s;
}

namespace {

// Shared engine cache for one-shot helpers. Keyed by (dimension, N).
Fft& cached_engine(const Grid& g) {
    static std::mutex m;
    static std::map<std::pair<int, int>, std::unique_ptr<Fft>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto key = std::make_pair(g.dimension(), g.n());
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<Fft>(g)).first;
    return *it->second;
}

// The cache hands out shared engines; guard their scratch against overlap.
std::mutex& oneshot_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

SpectralField transform_forward(const std::vector<double>& physical, const Grid& g) {
    if (physical.size() != g.size())
        throw ConfigError("transform_forward: got " + std::to_string(physical.size()) +
                          " samples for a grid of " + std::to_string(g.size()));
    std::lock_guard<std::mutex> lock(oneshot_mutex());
    SpectralField out(g);
    cached_engine(g).forward(physical.data(), out);
    return out;
}

std::vector<double> transform_inverse(const SpectralField& f) {
    std::lock_guard<std::mutex> lock(oneshot_mutex());
    std::vector<double> phys(f.grid().size());
    cached_engine(f.grid()).inverse(f, phys.data());
    return phys;
}

} // namespace ipm
