#pragma once

#include <stdexcept>
#include <string>

namespace rms {

// Out-of-domain parameters (alpha outside (0,2], p outside [0,1], ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested evaluation is outside what the implementation supports (N too large, ...).
struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ill-conditioned evaluation or non-convergence.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Statistical estimator has no usable data (no exceedances, tied order statistics).
struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration rejected by validation; `pointer` is the JSON pointer of the offending field.
struct ConfigError : std::runtime_error {
    ConfigError(std::string ptr, const std::string& msg)
        : std::runtime_error(ptr + ": " + msg), pointer(std::move(ptr)) {}
    std::string pointer;
};

}  // namespace rms
