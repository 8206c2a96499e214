#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cod {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rejected sketch/generator parameters. Each rejection reason carries its own
// code so callers can distinguish them programmatically.
class InvalidConfig : public Error {
public:
    enum class Code {
        OddEll,
        EllTooSmall,
        EllTooLarge,
        NonPositiveDim,
        ConfigMismatch,
        BadEpsilon,
        MissingStats,
        BadStats,
    };

    InvalidConfig(Code code, const std::string& msg) : Error(msg), code_(code) {}
    Code code() const noexcept { return code_; }

private:
    Code code_;
};

// Runtime data does not conform to the configured shapes.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// NaN or infinity where a finite value is required.
class NonFiniteValue : public Error {
public:
    using Error::Error;
};

// An operation was called outside its stated precondition
// (e.g. shrink on a buffer that is not full).
class ContractViolation : public Error {
public:
    using Error::Error;
};

// Iterative estimator failed to reach its tolerance within the iteration cap.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

namespace io {

// Typed I/O failure. `byte_offset` is where in the file the problem was
// detected (0 when not applicable, e.g. failure to open).
class IoError : public Error {
public:
    enum class Code {
        OpenFailed,
        WriteFailed,
        Truncated,
        BadMagic,
        BadVersion,
        Malformed,
    };

    IoError(Code code, std::uint64_t byte_offset, const std::string& msg)
        : Error(msg), code_(code), byte_offset_(byte_offset) {}

    Code code() const noexcept { return code_; }
    std::uint64_t byte_offset() const noexcept { return byte_offset_; }

private:
    Code code_;
    std::uint64_t byte_offset_;
};

} // namespace io
} // namespace cod
