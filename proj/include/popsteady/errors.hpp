#pragma once

#include <stdexcept>
#include <string>

namespace popsteady {

/// Bad or inconsistent configuration. `path` names the offending field
/// ("sweep.a.step", "tables.gamma.value", ...).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// A rate family was constructed with parameters that make the model
/// ill-posed (e.g. degenerate growth).
class InvalidRateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Generic numerical failure (non-convergence, non-finite values, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A rate function evaluated to a non-finite value.
class RateEvaluationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Linear solve hit a pivot below tolerance; `pivot_index` is the first
/// failing elimination step.
class SingularMatrixError : public NumericalError {
public:
    SingularMatrixError(int pivot_index, const std::string& what)
        : NumericalError(what), pivot_index_(pivot_index) {}
    int pivot_index() const { return pivot_index_; }

private:
    int pivot_index_;
};

/// Nullspace dimension exceeded one where a unique steady direction was
/// expected.
class DegenerateNullspaceError : public NumericalError {
public:
    DegenerateNullspaceError(int dimension, const std::string& what)
        : NumericalError(what), dimension_(dimension) {}
    int dimension() const { return dimension_; }

private:
    int dimension_;
};

/// The stationarity condition does not hold; carries the value of the
/// existence integral so callers can report how far off it is.
class NoSteadyStateError : public NumericalError {
public:
    NoSteadyStateError(double condition_value, const std::string& what)
        : NumericalError(what), condition_value_(condition_value) {}
    double condition_value() const { return condition_value_; }

private:
    double condition_value_;
};

/// Explicit integrator gave up (step underflow / step budget exhausted).
class StiffnessError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace popsteady
