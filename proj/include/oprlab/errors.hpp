#pragma once

#include <stdexcept>
#include <string>

namespace oprlab {

// Dimension or layout mismatch between tensors.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input outside the operation's domain (empty vector, action out of range, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Non-finite value where a finite one is required; updates are aborted.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem / serialization failure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// API misuse (stepping a finished episode, reading GAE before computing it).
struct UsageError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace oprlab
