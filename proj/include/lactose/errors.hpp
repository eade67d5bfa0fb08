#pragma once

#include <stdexcept>
#include <string>

namespace lactose {

/// Base class for all model / solver faults.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive step size fell below the configured minimum (stiff blow-up,
/// usually a sign of bad parameters).
struct StepSizeUnderflow : ModelError {
    using ModelError::ModelError;
};

/// A state left its physically valid region; `component` names the offender.
struct StateInvariantViolated : ModelError {
    std::string component;
    StateInvariantViolated(std::string comp, const std::string& what)
        : ModelError(what), component(std::move(comp)) {}
};

/// Target moment vector is not realizable by a non-negative density.
struct NotRealizable : ModelError {
    using ModelError::ModelError;
};

/// Explicit PBE step exceeds the CFL limit; message carries a suggested dt.
struct CflViolation : ModelError {
    double suggested_dt;
    CflViolation(const std::string& what, double dt)
        : ModelError(what), suggested_dt(dt) {}
};

/// Optimizer initial guess could not be simulated.
struct InfeasibleStart : ModelError {
    using ModelError::ModelError;
};

/// Configuration file / schema problem, with line diagnostics in the message.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lactose
