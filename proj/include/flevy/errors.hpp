#pragma once

#include <stdexcept>
#include <string>

namespace flevy {

/// Invalid parameters, malformed configuration or violated preconditions.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Two grid-based objects that must share or cover a grid do not.
class GridError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A requested grid would exceed the configured memory cap.
class SizingError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A numerical routine failed to reach its tolerance (quadrature,
/// root finding) or produced a non-finite value.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace flevy
