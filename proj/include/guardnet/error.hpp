#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace guardnet {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// Tensor/layer shape mismatch. Messages name the offending shapes.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Numeric argument outside its valid domain (negative stddev, empty mse, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration: unknown layer name, even AE depth, bad fraction, ...
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data (label out of range, length mismatch).
class DataError : public Error {
public:
    using Error::Error;
};

/// Operation called on an object in the wrong state (e.g. uncalibrated assertion).
class StateError : public Error {
public:
    using Error::Error;
};

/// Non-finite value appeared where a finite one is required.
class NumericError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read, or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Byte-level decoding failure; carries the offset where parsing stopped.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t byte_offset)
        : Error(message + " (byte offset " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}

    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_ = 0;
};

/// Wrong magic bytes or unsupported container version.
class FormatError : public ParseError {
public:
    using ParseError::ParseError;
};

/// File decoded cleanly but its contents contradict themselves.
class IntegrityError : public Error {
public:
    using Error::Error;
};

}  // namespace guardnet
