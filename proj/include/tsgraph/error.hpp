#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or truncated file content, or a container version mismatch.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Loaded values violate a data invariant (e.g. a non-finite sample).
class DataError : public Error {
public:
    DataError(const std::string& what, std::size_t frame)
        : Error(what + " (frame " + std::to_string(frame) + ")"), frame_(frame) {}
    std::size_t frame() const noexcept { return frame_; }

private:
    std::size_t frame_;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

/// The Sakoe-Chiba band does not contain the terminal DTW cell.
class InfeasibleBandError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class StateError : public Error {
public:
    using Error::Error;
};

/// NaN/Inf produced during training or evaluation.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace tsg
