#pragma once

#include <stdexcept>
#include <string>

namespace rwg {

/// Base class for all errors thrown by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid physical or numerical parameters (violated preconditions).
class invalid_argument_error : public error {
public:
    using error::error;
};

/// A root bracket failed to produce a sign change.
class bracket_error : public error {
public:
    using error::error;
};

/// A quadrature did not converge to the requested tolerance.
/// Carries the best available estimate and its error bound.
class quadrature_error : public error {
public:
    quadrature_error(const std::string& what, double estimate, double error_bound)
        : error(what), estimate(estimate), error_bound(error_bound) {}
    double estimate;
    double error_bound;
};

/// Spectral solver failure: reducible coupling pattern or degenerate
/// top eigenvalue.
class spectral_error : public error {
public:
    using error::error;
};

/// Configuration file / CLI parameter error.
class config_error : public error {
public:
    using error::error;
};

} // namespace rwg
