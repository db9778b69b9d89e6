#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epf {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
    kOk = 0,
    kConfig = 2,
    kData = 3,
    kTraining = 4,
    kDegenerate = 5,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept { return ExitCode::kData; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::kConfig; }
};

class RegistryError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class FeasibilityError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class DataError : public Error {
public:
    using Error::Error;
};

class ShapeError : public DataError {
public:
    using DataError::DataError;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    ParseError(const std::string& what, std::size_t line)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class OrderingError : public DataError {
public:
    using DataError::DataError;
};

class IncompleteError : public DataError {
public:
    using DataError::DataError;
};

class TrainingError : public Error {
public:
    TrainingError(const std::string& what, std::size_t epoch)
        : Error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
    std::size_t epoch() const noexcept { return epoch_; }
    ExitCode exit_code() const noexcept override { return ExitCode::kTraining; }

private:
    std::size_t epoch_;
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }
    ExitCode exit_code() const noexcept override { return ExitCode::kTraining; }

private:
    double residual_;
};

class DegenerateError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::kDegenerate; }
};

}  // namespace epf
