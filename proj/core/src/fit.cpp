#include "ipmlab/fit.hpp"

#include "ipmlab/errors.hpp"

#include <cmath>

namespace ipm {

DecayFit fit_power_law(const std::vector<std::pair<double, double>>& series, double t_min,
                       double t_max) {
    if (!(t_min < t_max)) throw ConfigError("fit_power_law: need t_min < t_max");

    std::vector<std::size_t> bad;
    std::vector<std::pair<double, double>> pts; // (log(1+t), log(value))
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto [t, v] = series[i];
        if (t < t_min || t > t_max) continue;
        if (!(v > 0.0) || !std::isfinite(v)) {
            bad.push_back(i);
            continue;
        }
        pts.emplace_back(std::log1p(t), std::log(v));
    }
    if (!bad.empty()) throw FitError("fit_power_law: nonpositive values in window", bad);
    if (pts.size() < 8) throw ConfigError("fit_power_law: fewer than 8 samples in window");

    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
    }
    const double n = double(pts.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) throw ConfigError("fit_power_law: degenerate window (single abscissa)");

    DecayFit f;
    f.exponent = sxy / sxx;
    f.constant = std::exp(my - f.exponent * mx);
    f.t_min = t_min;
    f.t_max = t_max;
    f.samples = pts.size();
    // R^2 = 1 - SS_res/SS_tot; define as 1 for a constant series fit exactly.
    double ss_res = 0.0;
    for (const auto& [x, y] : pts) {
        const double r = y - (my + f.exponent * (x - mx));
        ss_res += r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

} // namespace ipm
