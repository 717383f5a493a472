#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ipm {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// process exit codes: ConfigError/IntegrityError -> 2, BlowUpError and other
// NumericErrors -> 3; tolerance failures are reported data, not exceptions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration, schema violation, precondition failure on inputs.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Non-finite values or other numeric breakdown outside time stepping.
class NumericError : public Error {
public:
    using Error::Error;
};

// Time integration produced non-finite or runaway values. Carries the time of
// failure and the largest coefficient magnitude seen, so partial results can
// be reported alongside the failure.
class BlowUpError : public NumericError {
public:
    BlowUpError(double t, double max_abs)
        : NumericError("numeric blow-up at t = " + std::to_string(t) +
                       ", max |coefficient| = " + std::to_string(max_abs)),
          t(t), max_abs(max_abs) {}
    // Stateless evaluation (no time attached): right-hand side went non-finite.
    explicit BlowUpError(double max_abs)
        : NumericError("numeric blow-up: non-finite right-hand side, max |coefficient| = " +
                       std::to_string(max_abs)),
          t(0.0), max_abs(max_abs) {}
    double t;
    double max_abs;
};

// A step violated the integrator's stability guard.
class StabilityError : public NumericError {
public:
    using NumericError::NumericError;
};

// Advective CFL violation for a fixed-dt policy; the step is rejected.
class CflError : public NumericError {
public:
    CflError(double ratio, double dt)
        : NumericError("CFL violation: max|u|*dt/dx = " + std::to_string(ratio) +
                       " > 1; reduce dt below " + std::to_string(dt / ratio)),
          ratio(ratio) {}
    double ratio;
};

// Power-law fitting rejected the series; lists the offending sample indices.
class FitError : public Error {
public:
    FitError(const std::string& what, std::vector<std::size_t> offending)
        : Error(what), offending(std::move(offending)) {}
    std::vector<std::size_t> offending;
};

// Stored artifact fails its recorded digest or structural checks.
class IntegrityError : public Error {
public:
    using Error::Error;
};

} // namespace ipm
