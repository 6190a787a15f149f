#pragma once

#include <stdexcept>

namespace lmesim {

// Error taxonomy; the CLI maps each class to a distinct exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or missing configuration (paths, flags, parameter ranges).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent input data (case files, scenario series).
class DataError : public Error {
public:
    using Error::Error;
};

// A solve that should succeed did not (infeasible, singular, KKT failure).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace lmesim
