#pragma once

#include <stdexcept>
#include <string>

namespace neurogrow {

/// Shape or dimension mismatch between operands.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Semantically invalid input (empty dataset, out-of-range label, ...).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed file contents (IDX, network container).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration. Maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite values where finite arithmetic is required.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace neurogrow
