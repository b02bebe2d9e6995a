#pragma once

#include <stdexcept>
#include <string>

namespace spikefed {

/// Raised for invalid caller input: bad shapes, bad configuration values,
/// violated preconditions.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised for malformed or inconsistent data (files, caches, checkpoints).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace spikefed
