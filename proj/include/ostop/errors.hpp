#pragma once

#include <stdexcept>
#include <string>

namespace ostop {

/// Bad constructor/operation arguments (non-positive rates, empty windows, ...).
class InvalidParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the diffusion's state space.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An integrand or derived quantity evaluated to NaN/Inf where it must be finite.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature could not reach the requested tolerance within its subdivision
/// budget. Carries the best estimate and the error bound at the point of
/// giving up.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}
    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

/// An iterative procedure (interval widening, bisection) ran out of iterations.
/// Carries the last iterate endpoints.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_lo, double last_hi)
        : std::runtime_error(what), last_lo_(last_lo), last_hi_(last_hi) {}
    double last_lo() const noexcept { return last_lo_; }
    double last_hi() const noexcept { return last_hi_; }

private:
    double last_lo_;
    double last_hi_;
};

/// The widening loop swallowed the whole state space; the standing
/// hypotheses (non-negative reward satisfying the kernel identity) exclude
/// this, so the inputs violate them.
class DegeneracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sign structure too fine for the scan grid to resolve.
class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A combinatorial search exceeded its work budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A post-hoc self-check failed (a result that must satisfy the pair
/// conditions does not).
class InternalConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace ostop
