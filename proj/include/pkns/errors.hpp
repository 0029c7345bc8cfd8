#pragma once

#include <stdexcept>
#include <string>

namespace pkns {

// Bad or contradictory user input (config files, CLI arguments).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed, truncated or mismatched binary artifacts (checkpoints).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Velocity reconstruction from vorticity requires a mean-free vorticity field.
class NonzeroMeanVorticity : public std::runtime_error {
public:
    explicit NonzeroMeanVorticity(const std::string& what) : std::runtime_error(what) {}
};

// A time step produced a cell density below the tolerated negative undershoot.
// The caller is expected to reject the step and retry with a smaller dt.
class PositivityLoss : public std::runtime_error {
public:
    PositivityLoss(const std::string& what, double min_value, double linf)
        : std::runtime_error(what), min_value(min_value), linf(linf) {}
    double min_value;
    double linf;
};

// Change of variables asked for data outside the stored radial domain.
class InterpolationRange : public std::runtime_error {
public:
    explicit InterpolationRange(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pkns
