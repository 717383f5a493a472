#include "ipmlab/whole_space.hpp"

#include "ipmlab/errors.hpp"
#include "ipmlab/grid.hpp"
#include "ipmlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ipm {

namespace {

double weight_sq(AngularWeight w, double r, double theta, double lambda_j) {
    switch (w) {
    case AngularWeight::Identity:
        return 1.0;
    case AngularWeight::R1: {
        const double c = std::cos(theta);
        return c * c; // |cos|^2
    }
    case AngularWeight::R1Squared: {
        const double c = std::cos(theta);
        return c * c * c * c;
    }
    case AngularWeight::LambdaJ:
        return std::pow(r, 2.0 * lambda_j);
    }
    return 1.0;
}

// Panel edges refining dyadically toward the angular wells at pi/2 and
// 3pi/2; levels scale with sqrt(t), the well width.
std::vector<double> theta_edges(double t, int extra_levels) {
    const int levels =
        std::max(6, int(std::ceil(std::log2(std::max(1.0, std::sqrt(t))))) + 2) + extra_levels;
    std::vector<double> edges;
    auto push_side = [&](double well, int side) {
        // side -1: approach from below; side +1: recede above.
        for (int l = 0; l <= levels; ++l) {
            const double off = (kPi / 2) * std::pow(2.0, -double(l));
            edges.push_back(well + side * off);
        }
        edges.push_back(well);
    };
    push_side(kPi / 2, -1);
    push_side(kPi / 2, +1);
    push_side(3 * kPi / 2, -1);
    push_side(3 * kPi / 2, +1);
    edges.push_back(0.0);
    edges.push_back(kTwoPi);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                edges.end());
    return edges;
}

struct SquaredMass {
    double weighted; // with the time factor and weight
    double plain;    // t = 0, identity weight
    double tail;     // plain mass in the outer radial decade
};

SquaredMass integrate_sq(const RadialAngularSpec& spec, double t, AngularWeight w, int n_r,
                         int n_theta, int extra_levels) {
    const auto& rn = gauss_legendre_nodes(n_r);
    const auto& rw = gauss_legendre_weights(n_r);
    const auto& tn = gauss_legendre_nodes(n_theta);
    const auto& tw = gauss_legendre_weights(n_theta);
    const std::vector<double> edges = theta_edges(t, extra_levels);

    SquaredMass m{0.0, 0.0, 0.0};
    const double rh = 0.5 * spec.r_max;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double th_half = 0.5 * (edges[e + 1] - edges[e]);
        const double th_mid = 0.5 * (edges[e + 1] + edges[e]);
        if (th_half <= 0.0) continue;
        for (int i = 0; i < n_theta; ++i) {
            const double theta = th_mid + th_half * tn[std::size_t(i)];
            const double c = std::cos(theta);
            const double damp = std::exp(-2.0 * c * c * t);
            double radial_w = 0.0, radial_plain = 0.0, radial_tail = 0.0;
            for (int j = 0; j < n_r; ++j) {
                const double r = rh + rh * rn[std::size_t(j)];
                const double p2 = std::norm(spec.profile(r, theta)) * r;
                const double contrib = rw[std::size_t(j)] * p2;
                radial_plain += contrib;
                if (r >= 0.9 * spec.r_max) radial_tail += contrib;
                radial_w += contrib * weight_sq(w, r, theta, spec.lambda_j);
            }
            const double ang = tw[std::size_t(i)] * th_half;
            m.weighted += ang * damp * radial_w * rh;
            m.plain += ang * radial_plain * rh;
            m.tail += ang * radial_tail * rh;
        }
    }
    return m;
}

} // namespace

WholeSpaceNorm whole_space_norm(const RadialAngularSpec& spec, double t, AngularWeight weight) {
    if (!spec.profile) throw ConfigError("whole_space_norm: empty profile");
    if (t < 0.0) throw ConfigError("whole_space_norm: t must be >= 0");
    if (!(spec.r_max > 0.0)) throw ConfigError("whole_space_norm: r_max must be > 0");
    if (spec.n_r < 4 || spec.n_theta < 4)
        throw ConfigError("whole_space_norm: quadrature orders must be >= 4");
    if (weight == AngularWeight::LambdaJ && spec.lambda_j < 0.0)
        throw ConfigError("whole_space_norm: negative smoothing exponent unsupported");

    SquaredMass lo = integrate_sq(spec, t, weight, spec.n_r, spec.n_theta, 0);
    if (!(lo.plain > 0.0)) throw ConfigError("whole_space_norm: profile has zero mass");
    if (lo.tail > 1e-10 * lo.plain)
        throw ConfigError("whole_space_norm: outer radial decade holds more than 1e-10 of the "
                          "mass; enlarge r_max");

    SquaredMass hi = integrate_sq(spec, t, weight, 2 * spec.n_r, 2 * spec.n_theta, 1);
    double denom = std::max(std::abs(hi.weighted), 1e-300);
    double err_sq = std::abs(hi.weighted - lo.weighted) / denom;
    double value_sq = hi.weighted;
    if (err_sq > 1e-6) {
        const SquaredMass finer = integrate_sq(spec, t, weight, 4 * spec.n_r, 4 * spec.n_theta, 2);
        denom = std::max(std::abs(finer.weighted), 1e-300);
        err_sq = std::abs(finer.weighted - hi.weighted) / denom;
        value_sq = finer.weighted;
    }

    WholeSpaceNorm out;
    out.value = std::sqrt(std::max(value_sq, 0.0));
    out.error_estimate = 0.5 * err_sq; // norm carries half the squared-mass error
    out.converged = err_sq <= 1e-6;
    return out;
}

double sharpness_radial(const std::function<double(double)>& radial_profile, double t) {
    if (!radial_profile) throw ConfigError("sharpness_radial: empty profile");
    RadialAngularSpec spec;
    spec.profile = [&radial_profile](double r, double) { return cdouble(radial_profile(r), 0.0); };
    const double now = whole_space_norm(spec, t, AngularWeight::Identity).value;
    const double start = whole_space_norm(spec, 0.0, AngularWeight::Identity).value;
    return now / start;
}

double sharpness_concentrated(double t) {
    if (t < 0.0) throw ConfigError("sharpness_concentrated: t must be >= 0");
    const double w = 1.0 / (t + 1.0);
    const QuadResult q = adaptive_integrate(
        [t](double theta) {
            const double c = std::cos(theta);
            return std::exp(-2.0 * c * c * t);
        },
        kPi / 2 - w, kPi / 2 + w, 1e-10, 1e-14);
    return std::sqrt(0.5 * (t + 1.0) * q.value);
}

} // namespace ipm
