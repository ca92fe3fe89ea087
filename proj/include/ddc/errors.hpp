#pragma once

#include <stdexcept>
#include <string>

namespace ddc {

/// Malformed caller input (dimension mismatch, too-short sequences, bad config).
class input_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Mathematical precondition violated (singular pencil, non-observable pair).
class domain_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical breakdown (ill-conditioned transformation, retry exhaustion).
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A measured window that is not a trajectory of the system.
class inconsistent_window_error : public std::runtime_error {
public:
    inconsistent_window_error(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Equality constraints of a QP admit no solution.
class infeasible_error : public std::runtime_error {
public:
    infeasible_error(const std::string& what, double constraint_residual)
        : std::runtime_error(what), residual_(constraint_residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

}  // namespace ddc
