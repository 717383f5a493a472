#include "ipmlab/oracles.hpp"

#include "ipmlab/errors.hpp"
#include "ipmlab/grid.hpp"
#include "ipmlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace ipm {

namespace {

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> v;
    v.reserve(std::size_t(count));
    const double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < count; ++i)
        v.push_back(std::exp(la + (lb - la) * i / (count - 1)));
    return v;
}

// Sample grid for sups over [0, t_max]: zero plus a log-spaced sweep.
std::vector<double> sup_grid(double t_max, int count) {
    std::vector<double> ts{0.0};
    if (t_max <= 0.0) return ts;
    if (t_max < 0.1) {
        for (int i = 1; i <= 64; ++i) ts.push_back(t_max * i / 64.0);
        return ts;
    }
    for (double t : log_spaced(0.01, t_max, count)) ts.push_back(t);
    return ts;
}

// Maximizes a unimodal-on-the-bracket function; returns the best value seen
// and writes the corresponding argument.
template <typename F>
double golden_max(F&& f, double a, double b, double& arg) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < 200 && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    if (f1 >= f2) {
        arg = x1;
        return f1;
    }
    arg = x2;
    return f2;
}

} // namespace

double angular_integral(int k, double t) {
    if (k < 0) throw ConfigError("angular_integral: k must be >= 0");
    if (t < 0.0) throw ConfigError("angular_integral: t must be >= 0");
    auto f = [k, t](double theta) {
        const double c = std::cos(theta);
        return std::pow(std::abs(c), double(k)) * std::exp(-c * c * t);
    };
    // Panel edges at the |cos| kinks / Laplace wells keep each piece smooth.
    const double edges[5] = {0.0, kPi / 2, kPi, 3 * kPi / 2, kTwoPi};
    double value = 0.0;
    for (int p = 0; p < 4; ++p) {
        const QuadResult q = adaptive_integrate(f, edges[p], edges[p + 1], 2.5e-10, 1e-14);
        value += q.value;
    }
    return value;
}

PointwiseBound pointwise_bound_constant(int k, double t_max) {
    if (k < 1) throw ConfigError("pointwise_bound_constant: k must be >= 1");
    if (!(t_max > 0.0)) throw ConfigError("pointwise_bound_constant: t_max must be > 0");

    auto value_at = [k](double amp, double t) {
        return std::pow(t + 1.0, 0.5 * k) * std::pow(amp, double(k)) * std::exp(-amp * amp * t);
    };
    // Best amplitude for fixed t; unimodal on [0, 1] with interior critical
    // point A^2 = k/(2t) when that lands inside.
    double scratch = 0.0;
    auto best_over_amp = [&](double t, double& amp_out) {
        return golden_max([&](double a) { return value_at(a, t); }, 0.0, 1.0, amp_out);
    };
    auto phi = [&](double t) { return best_over_amp(t, scratch); };

    const std::vector<double> ts = sup_grid(t_max, 600);
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double v = phi(ts[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    const double lo = ts[best > 0 ? best - 1 : 0];
    const double hi = ts[std::min(best + 1, ts.size() - 1)];
    PointwiseBound out;
    if (hi > lo) {
        out.constant = golden_max(phi, lo, hi, out.arg_t);
    } else {
        out.constant = best_val;
        out.arg_t = ts[best];
    }
    if (best_val > out.constant) { // grid endpoint can beat the interior polish
        out.constant = best_val;
        out.arg_t = ts[best];
    }
    best_over_amp(out.arg_t, out.arg_amplitude);
    return out;
}

ConvolutionBound convolution_bound(double delta, double eta, double t_max) {
    if (!(delta > 0.0) || !(eta > 0.0))
        throw ConfigError("convolution_bound: delta and eta must be > 0");
    if (t_max < 0.0) throw ConfigError("convolution_bound: t_max must be >= 0");

    auto integral = [delta, eta](double t) {
        if (t <= 0.0) return 0.0;
        auto f = [delta, eta, t](double s) {
            return std::pow(t - s + 1.0, -delta) * std::pow(s + 1.0, -1.0 - eta);
        };
        // Geometric breakpoints toward both endpoints: the integrand
        // concentrates at s = 0 and s = t once t is large.
        std::vector<double> bp{0.0};
        for (double step = 1.0; step < 0.5 * t; step *= 2.0) bp.push_back(step);
        bp.push_back(0.5 * t);
        for (std::size_t i = bp.size() - 1; i-- > 0;) bp.push_back(t - bp[i]);
        double v = 0.0;
        for (std::size_t i = 0; i + 1 < bp.size(); ++i)
            if (bp[i + 1] > bp[i]) v += gl_panel(f, bp[i], bp[i + 1], 16);
        return v;
    };
    auto ratio = [&](double t) { return std::pow(t + 1.0, delta) * integral(t); };

    const std::vector<double> ts = sup_grid(t_max, 400);
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double v = ratio(ts[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    ConvolutionBound out;
    const double lo = ts[best > 0 ? best - 1 : 0];
    const double hi = ts[std::min(best + 1, ts.size() - 1)];
    if (hi > lo) {
        out.sup_ratio = golden_max(ratio, lo, hi, out.arg_t);
    } else {
        out.sup_ratio = best_val;
        out.arg_t = ts[best];
    }
    if (best_val > out.sup_ratio) {
        out.sup_ratio = best_val;
        out.arg_t = ts[best];
    }
    return out;
}

GronwallResult gronwall_ode(double f0, double A, double t_max) {
    if (!(f0 >= 0.0)) throw ConfigError("gronwall_ode: f0 must be >= 0");
    if (!(A >= 0.0)) throw ConfigError("gronwall_ode: A must be >= 0");
    if (!(t_max > 0.0)) throw ConfigError("gronwall_ode: t_max must be > 0");

    auto rhs = [A](double t, double f) {
        return -f / std::sqrt(t + 1.0) + A * std::pow(t + 1.0, -2.5);
    };

    // Dormand-Prince 5(4) pair, adaptive step.
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                        e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

    const double rtol = 1e-11, atol = 1e-15;
    double t = 0.0, f = f0, dt = 1e-3;

    GronwallResult out;
    std::vector<double> targets = sup_grid(t_max, 600);
    out.trajectory.reserve(targets.size());
    out.trajectory.emplace_back(0.0, f0);

    for (std::size_t ti = 1; ti < targets.size(); ++ti) {
        const double target = targets[ti];
        while (t < target) {
            const double h = std::min(dt, target - t);
            const double k1 = rhs(t, f);
            const double k2 = rhs(t + c2 * h, f + h * a21 * k1);
            const double k3 = rhs(t + c3 * h, f + h * (a31 * k1 + a32 * k2));
            const double k4 = rhs(t + c4 * h, f + h * (a41 * k1 + a42 * k2 + a43 * k3));
            const double k5 = rhs(t + c5 * h, f + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const double k6 =
                rhs(t + h, f + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const double f5 = f + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const double k7 = rhs(t + h, f5);
            const double f4 =
                f + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double sc = atol + rtol * std::max(std::abs(f), std::abs(f5));
            const double err = std::abs(f5 - f4) / sc;
            if (err <= 1.0) {
                t += h;
                f = f5;
            }
            const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            dt = h * std::clamp(factor, 0.2, 5.0);
            if (dt < 1e-12 * (1.0 + t))
                throw NumericError("gronwall_ode: step size collapsed");
        }
        out.trajectory.emplace_back(t, f);
    }

    const double denom = f0 + A;
    if (denom > 0.0) {
        for (const auto& [tt, ff] : out.trajectory) {
            const double stated = ff * std::pow(tt + 1.0, 2.5) / denom;
            const double observed = ff * (tt + 1.0) * (tt + 1.0) / denom;
            if (stated > out.sup_ratio_stated) {
                out.sup_ratio_stated = stated;
                out.arg_t_stated = tt;
            }
            if (observed > out.sup_ratio_observed) {
                out.sup_ratio_observed = observed;
                out.arg_t_observed = tt;
            }
        }
    }
    return out;
}

} // namespace ipm
