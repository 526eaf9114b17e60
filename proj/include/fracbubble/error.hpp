#pragma once

#include <stdexcept>
#include <string>

namespace fb {

/// Raised when an input violates an operation's precondition.
/// `field` names the offending parameter (used for CLI diagnostics).
class DomainError : public std::invalid_argument {
public:
    DomainError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Raised when a numerical procedure cannot deliver its contract
/// (non-convergence, unresolved grid, noise-dominated fit).
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fb
