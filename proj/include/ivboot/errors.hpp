#pragma once

#include <stdexcept>
#include <string>

namespace ivboot {

// Inconsistent array shapes or out-of-domain scalar arguments.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The moment system does not pin down a coefficient vector.
struct IdentificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Linear constraints with no common solution.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Normal matrix of the quasi log-likelihood is not invertible.
struct SingularDesignError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// (I-P) H (I-P)^T block is singular on its range.
struct SingularNuisanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Multiplier weights produced an indefinite weighted normal matrix.
// Callers redraw the weights and count the event.
struct IndefiniteWeightsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Too many bootstrap draws needed a redraw.
struct BootstrapAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ivboot
