#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace ipm {

// Result of a log-log least-squares fit of the model value = C * (1+t)^p
// over a time window. r_squared is the coefficient of determination in
// log space; samples counts the points actually used.
struct DecayFit {
    double exponent = 0.0;
    double constant = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    double r_squared = 0.0;
    std::size_t samples = 0;
};

// Regresses log(value) on log(1+t) over samples with t_min <= t <= t_max.
// Throws ConfigError when fewer than 8 samples land in the window and
// FitError (listing the offending series indices) when any windowed value
// is not strictly positive.
DecayFit fit_power_law(const std::vector<std::pair<double, double>>& series, double t_min,
                       double t_max);

} // namespace ipm
