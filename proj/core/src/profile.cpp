#include "ipmlab/profile.hpp"

#include "ipmlab/errors.hpp"
#include "ipmlab/grid.hpp"

#include <cmath>
#include <cstdio>

namespace ipm {

namespace {

void trim_tail(std::vector<double>& v) {
    while (!v.empty() && v.back() == 0.0) v.pop_back();
}

void append_term(std::string& out, double coef, const std::string& basis) {
    if (coef == 0.0) return;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", std::abs(coef));
    if (out.empty())
        out += coef < 0 ? "-" : "";
    else
        out += coef < 0 ? " - " : " + ";
    out += buf;
    if (!basis.empty()) out += "*" + basis;
}

} // namespace

StratifiedProfile::StratifiedProfile(double K, std::vector<double> sin_coeffs,
                                     std::vector<double> cos_coeffs)
    : k_(K), sin_(std::move(sin_coeffs)), cos_(std::move(cos_coeffs)) {
    if (!std::isfinite(k_)) throw ConfigError("StratifiedProfile: K must be finite");
    for (double a : sin_)
        if (!std::isfinite(a)) throw ConfigError("StratifiedProfile: non-finite sin coefficient");
    for (double b : cos_)
        if (!std::isfinite(b)) throw ConfigError("StratifiedProfile: non-finite cos coefficient");
    trim_tail(sin_);
    trim_tail(cos_);
}

StratifiedProfile StratifiedProfile::from_samples(double K,
                                                  const std::vector<double>& omega_samples) {
    const int m_count = int(omega_samples.size());
    if (m_count < 4 || m_count % 2 != 0)
        throw ConfigError("StratifiedProfile::from_samples: need an even count >= 4");
    const int half = m_count / 2;
    std::vector<double> a(std::size_t(half), 0.0), b(std::size_t(half) + 1, 0.0);
    for (int m = 0; m <= half; ++m) {
        double cs = 0.0, sn = 0.0;
        for (int j = 0; j < m_count; ++j) {
            const double y = -kPi + kTwoPi * j / m_count;
            cs += omega_samples[std::size_t(j)] * std::cos(m * y);
            sn += omega_samples[std::size_t(j)] * std::sin(m * y);
        }
        const double scale = (m == 0 || m == half) ? 1.0 / m_count : 2.0 / m_count;
        b[std::size_t(m)] = cs * scale;
        if (m >= 1 && m < half) a[std::size_t(m) - 1] = sn * scale;
    }
    for (double& v : a)
        if (std::abs(v) < 1e-13) v = 0.0;
    for (double& v : b)
        if (std::abs(v) < 1e-13) v = 0.0;
    return StratifiedProfile(K, std::move(a), std::move(b));
}

StratifiedProfile StratifiedProfile::from_function(double K, std::function<double(double)> omega,
                                                   int samples) {
    if (!omega) throw ConfigError("StratifiedProfile::from_function: empty callable");
    if (samples < 4) throw ConfigError("StratifiedProfile::from_function: samples >= 4 required");
    if (samples % 2 != 0) ++samples;
    std::vector<double> vals(static_cast<std::size_t>(samples));
    for (int j = 0; j < samples; ++j) vals[std::size_t(j)] = omega(-kPi + kTwoPi * j / samples);
    StratifiedProfile p = from_samples(K, vals);
    p.raw_ = std::move(omega);
    return p;
}

double StratifiedProfile::omega_derivative(int order, double y) const {
    if (order < 0) throw ConfigError("StratifiedProfile: derivative order must be >= 0");
    const double phase = order * (kPi / 2);
    double s = 0.0;
    for (std::size_t i = 0; i < sin_.size(); ++i) {
        if (sin_[i] == 0.0) continue;
        const double m = double(i + 1);
        s += sin_[i] * std::pow(m, order) * std::sin(m * y + phase);
    }
    for (std::size_t i = 0; i < cos_.size(); ++i) {
        if (cos_[i] == 0.0) continue;
        const double m = double(i);
        const double factor = (i == 0) ? (order == 0 ? 1.0 : 0.0) : std::pow(m, order);
        s += cos_[i] * factor * std::cos(m * y + phase);
    }
    return s;
}

std::string StratifiedProfile::describe() const {
    std::string out;
    append_term(out, k_, "y");
    for (std::size_t i = 0; i < sin_.size(); ++i) {
        char basis[32];
        std::snprintf(basis, sizeof(basis), "sin(%zu*y)", i + 1);
        append_term(out, sin_[i], basis);
    }
    for (std::size_t i = 0; i < cos_.size(); ++i) {
        if (i == 0) {
            append_term(out, cos_[0], "");
            continue;
        }
        char basis[32];
        std::snprintf(basis, sizeof(basis), "cos(%zu*y)", i);
        append_term(out, cos_[i], basis);
    }
    if (out.empty()) out = "0";
    return out;
}

} // namespace ipm
