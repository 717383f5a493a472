#include "ipmlab/quadrature.hpp"

#include "ipmlab/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace ipm {

namespace {

struct Rule {
    std::vector<double> nodes, weights;
};

Rule build_rule(int n) {
    Rule r;
    r.nodes.assign(std::size_t(n), 0.0);
    r.weights.assign(std::size_t(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[std::size_t(i)] = -x;
        r.nodes[std::size_t(n - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.weights[std::size_t(i)] = w;
        r.weights[std::size_t(n - 1 - i)] = w;
    }
    return r;
}

const Rule& cached_rule(int n) {
    if (n < 1 || n > 256) throw ConfigError("gauss_legendre: order out of range [1, 256]");
    static std::map<int, Rule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

struct Accumulator {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

void integrate_panel(const std::function<double(double)>& f, double a, double b, double tol,
                     int depth, int max_depth, Accumulator& acc) {
    const double coarse = gl_panel(f, a, b, 12);
    const double fine = gl_panel(f, a, b, 24);
    const double err = std::abs(fine - coarse);
    if (err <= tol || depth >= max_depth) {
        acc.value += fine;
        acc.error += err;
        if (err > tol) acc.converged = false;
        return;
    }
    const double mid = 0.5 * (a + b);
    integrate_panel(f, a, mid, 0.5 * tol, depth + 1, max_depth, acc);
    integrate_panel(f, mid, b, 0.5 * tol, depth + 1, max_depth, acc);
}

} // namespace

const std::vector<double>& gauss_legendre_nodes(int order) { return cached_rule(order).nodes; }
const std::vector<double>& gauss_legendre_weights(int order) { return cached_rule(order).weights; }

double gl_panel(const std::function<double(double)>& f, double a, double b, int order) {
    const Rule& r = cached_rule(order);
    const double half = 0.5 * (b - a);
    const double center = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        s += r.weights[i] * f(center + half * r.nodes[i]);
    return s * half;
}

QuadResult adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                              double rtol, double atol, int max_depth) {
    if (!(b > a)) throw ConfigError("adaptive_integrate: need b > a");
    if (rtol <= 0.0 && atol <= 0.0)
        throw ConfigError("adaptive_integrate: need a positive tolerance");

    // Scale the relative part off a first coarse estimate, then refine.
    const double scale = std::abs(gl_panel(f, a, b, 24));
    const double tol = std::max(atol, rtol * scale);

    Accumulator acc;
    integrate_panel(f, a, b, tol, 0, max_depth, acc);

    // Re-check the relative tolerance against the final value.
    const double final_tol = std::max(atol, rtol * std::abs(acc.value));
    return {acc.value, acc.error, acc.converged || acc.error <= final_tol};
}

} // namespace ipm
