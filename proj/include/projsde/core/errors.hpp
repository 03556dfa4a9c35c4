#pragma once

#include <stdexcept>
#include <string>

namespace projsde {

/// Base class for everything this library throws.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad configuration: invalid flags, missing model data, unusable step sizes.
struct ConfigError : Error {
    using Error::Error;
};

/// A model/method combination that is structurally unsupported
/// (non-commutative noise for Milstein, missing special-class data for Taylor).
struct UnsupportedModelError : ConfigError {
    using ConfigError::ConfigError;
};

/// Numerical failure during integration or a solve.
struct NumericError : Error {
    using Error::Error;
};

struct SingularMatrixError : NumericError {
    using NumericError::NumericError;
};

struct DegenerateGradientError : NumericError {
    using NumericError::NumericError;
};

/// Iterative solve (implicit scheme or projection Newton) failed to converge.
/// The message carries the offending state and step size.
struct NonconvergenceError : NumericError {
    using NumericError::NumericError;
};

/// Evaluator failure while sampling states (verification utilities).
struct EvaluationError : NumericError {
    using NumericError::NumericError;
};

} // namespace projsde
