#pragma once

#include <stdexcept>
#include <string>

namespace phs {

// Base class for all workbench errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration / input problems (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// Numeric failures during a run (CLI exit code 3).
struct NumericError : Error {
    using Error::Error;
};

struct NonPositiveLength final : ConfigError {
    using ConfigError::ConfigError;
};

struct PatchOffGrid final : ConfigError {
    using ConfigError::ConfigError;
};

struct KinkMismatch final : ConfigError {
    using ConfigError::ConfigError;
};

struct BcViolation final : NumericError {
    using NumericError::NumericError;
};

struct FrameworkMismatch final : ConfigError {
    using ConfigError::ConfigError;
};

struct CflViolation final : ConfigError {
    using ConfigError::ConfigError;
};

struct NonFiniteState final : NumericError {
    using NumericError::NumericError;
};

struct ParseError final : ConfigError {
    using ConfigError::ConfigError;
};

struct ValidationError final : ConfigError {
    using ConfigError::ConfigError;
};

struct IoError final : Error {
    using Error::Error;
};

}  // namespace phs
