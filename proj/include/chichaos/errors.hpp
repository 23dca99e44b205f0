#pragma once

#include <stdexcept>
#include <string>

namespace chichaos {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A state component became non-finite during evaluation or integration.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& msg, double tau)
        : Error(msg + " (tau=" + std::to_string(tau) + ")"), tau_(tau) {}
    /// Normalized time at which divergence was detected.
    double tau() const noexcept { return tau_; }

private:
    double tau_;
};

/// Adaptive step size underflowed; the problem is too stiff for the method.
class StiffnessError : public Error {
public:
    using Error::Error;
};

/// A closed-form expression hit a pole or vanishing denominator.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Bisection bracket does not straddle a classification change.
class NoTransitionError : public Error {
public:
    using Error::Error;
};

/// An operation precondition was violated.
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace chichaos
