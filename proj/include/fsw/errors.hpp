#pragma once

#include <stdexcept>
#include <string>

namespace fsw {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failures (CLI exit code 3).
struct NumericalError : Error {
    using Error::Error;
};
struct DegenerateMap : NumericalError {
    double min_j;
    DegenerateMap(const std::string& what, double minj) : NumericalError(what), min_j(minj) {}
};
struct NoConvergence : NumericalError {
    int iterations;
    NoConvergence(const std::string& what, int it) : NumericalError(what), iterations(it) {}
};
struct StepRejected : NumericalError {
    using NumericalError::NumericalError;
};
struct SingularMode : NumericalError {
    int m1, m2;
    SingularMode(const std::string& what, int a, int b) : NumericalError(what), m1(a), m2(b) {}
};
struct CompatibilityViolated : NumericalError {
    using NumericalError::NumericalError;
};
struct FitUnreliable : NumericalError {
    using NumericalError::NumericalError;
};

struct GridMismatch : Error {
    using Error::Error;
};
struct OrderTooHigh : Error {
    using Error::Error;
};
struct InsufficientHistory : Error {
    using Error::Error;
};

// Configuration errors (exit code 2).
struct ConfigError : Error {
    using Error::Error;
};
struct ParseError : ConfigError {
    int line;
    ParseError(const std::string& what, int l) : ConfigError(what), line(l) {}
};
struct ValidationError : ConfigError {
    std::string field;
    ValidationError(const std::string& f, const std::string& what) : ConfigError(f + ": " + what), field(f) {}
};

// Persistence errors (exit code 4).
struct IoError : Error {
    using Error::Error;
};
struct FormatError : IoError {
    using IoError::IoError;
};
struct VersionError : IoError {
    using IoError::IoError;
};

}  // namespace fsw
