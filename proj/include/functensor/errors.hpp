#pragma once

#include <stdexcept>
#include <string>

namespace functensor {

/// Mismatched extents between tensors, factor rows, or input vectors.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite or otherwise out-of-domain scalar input.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid parameters, missing config, unknown categories.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unreadable data files.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Singular systems, diverging training.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace functensor
