#pragma once

#include <stdexcept>
#include <string>

namespace ds3 {

/// Base class for all library errors. The exit code groups errors the way
/// the CLI reports them: data-quality problems map to 2, configuration
/// problems to 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual int exit_code() const noexcept { return 2; }
};

/// Invalid values inside otherwise well-formed inputs (non-finite entries,
/// missing labeled outcomes, bad indicator values).
class DataError : public Error {
public:
    using Error::Error;
};

/// Structurally malformed input files (bad header, wrong cell count).
class SchemaError : public DataError {
public:
    using DataError::DataError;
};

/// Inputs that are formally valid but carry no usable information
/// (zero labeled rows, all-zero indicator).
class DegenerateDataError : public DataError {
public:
    using DataError::DataError;
};

/// Too few observations for the requested fit.
class InsufficientDataError : public DataError {
public:
    using DataError::DataError;
};

/// Numerically singular design or covariance where the estimand is undefined.
class SingularError : public DataError {
public:
    using DataError::DataError;
};

/// Invalid run configuration (bad fold count, bad alpha, unknown keys, ...).
class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// Dimension mismatches between configured inputs.
class ShapeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Arguments outside a function's mathematical domain.
class DomainError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

}  // namespace ds3
