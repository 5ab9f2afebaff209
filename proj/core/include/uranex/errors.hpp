#pragma once

#include <stdexcept>
#include <string>

namespace uranex {

/// Malformed or invalid configuration (exit code 1 in the CLI).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure: divergence, non-convergence, bracket failure (exit code 2).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, long step = -1)
        : std::runtime_error(what), step_(step)
    {
    }

    /// Control step at which the failure occurred, or -1 when not applicable.
    [[nodiscard]] long step() const { return step_; }

private:
    long step_;
};

}  // namespace uranex
