#pragma once

#include <stdexcept>
#include <string>

namespace aave {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a documented contract (bad record, unknown label, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

class DecodeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class SchemaError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A statistic is undefined for the given input (zero variance, no overlap, ...).
class StatsError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

} // namespace aave

namespace aave {

/// A recoverable problem tied to an input location (line 0 when not line-based).
struct Diagnostic {
    std::size_t line = 0;
    std::string message;

    std::string str() const {
        return line ? "line " + std::to_string(line) + ": " + message : message;
    }
};

} // namespace aave
