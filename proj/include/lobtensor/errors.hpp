#pragma once

#include <stdexcept>
#include <string>

namespace lobtensor {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mode or index outside the tensor's extent.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Incompatible shapes between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Precondition violated by caller-supplied data (empty class, bad labels...).
class InputError : public Error {
public:
    using Error::Error;
};

/// Factorization or eigen-solver failure.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Malformed text in a data or model file. Carries the 1-based line number
/// when one is known (0 otherwise).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed data that violates a semantic rule (nonmonotone days, crossed book).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration (unknown method, empty grid, bad flag value).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace lobtensor
