#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace spde_lab {

/// Invalid scalar parameter (exponent out of range, k out of range, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operands live on different grids or have mismatched lengths.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A randomized checker could not use any of its samples.
class DegenerateSampleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An exact discrete identity failed to hold; indicates a bug, not bad input.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Missing or contradictory configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Damped Newton failed to reach the residual tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double last_residual,
                std::optional<std::size_t> step = std::nullopt)
        : std::runtime_error(what), last_residual_(last_residual), step_(step) {}

    double last_residual() const noexcept { return last_residual_; }
    std::optional<std::size_t> step() const noexcept { return step_; }

private:
    double last_residual_;
    std::optional<std::size_t> step_;
};

}  // namespace spde_lab
