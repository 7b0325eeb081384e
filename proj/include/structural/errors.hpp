#pragma once

#include <stdexcept>
#include <string>

namespace structural {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid user-facing configuration (bad R, N, parameters, unknown names).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Argument outside a function's domain (sqrt/log of a negative, |k| >= 1 ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Physical singularity hit while evaluating a problem (collision, x1 = 0 ...).
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

// Non-finite values or runaway growth in an iterative solve.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// Fixed-point iteration exhausted max_iter; carries the last increment norm.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

// Internal invariant broken (e.g. a kernel of unexpected dimension).
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace structural
