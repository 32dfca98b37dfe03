#pragma once

#include <stdexcept>
#include <string>

namespace qprop {

// Error taxonomy mirrors the CLI exit codes:
//   ConfigError -> 2, NumericError -> 3, IoError -> 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Malformed expression text. `offset` is a byte offset into the source string.
class ParseError : public ConfigError {
public:
    ParseError(std::size_t offset, std::string expected, std::string found)
        : ConfigError("parse error at offset " + std::to_string(offset) + ": expected " +
                      expected + ", found " + found),
          offset(offset),
          expected(std::move(expected)),
          found(std::move(found)) {}

    std::size_t offset;
    std::string expected;
    std::string found;
};

// A parameter was referenced but never bound to a value.
class UnboundParameterError : public NumericError {
public:
    explicit UnboundParameterError(std::string parameter)
        : NumericError("unbound parameter '" + parameter + "'"), parameter(std::move(parameter)) {}

    std::string parameter;
};

// sqrt/log of a negative argument, division by zero, or a non-finite result.
class DomainError : public NumericError {
public:
    DomainError(std::string what, double t)
        : NumericError(std::move(what) + " at t = " + std::to_string(t)), t(t) {}

    double t;
};

class OdeError : public NumericError {
public:
    OdeError(std::string what, double t)
        : NumericError(std::move(what) + " at t = " + std::to_string(t)), t(t) {}

    double t;
};

// Kernel evaluation requested within eps of a zero of beta(t).
class CausticError : public NumericError {
public:
    CausticError(double t, double beta_zero)
        : NumericError("kernel is singular at t = " + std::to_string(t) +
                       " (focal point: beta vanishes near t = " + std::to_string(beta_zero) + ")"),
          t(t),
          beta_zero(beta_zero) {}

    double t;
    double beta_zero;
};

class QuadratureError : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace qprop
