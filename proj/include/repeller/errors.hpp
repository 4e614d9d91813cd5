#pragma once

#include <stdexcept>
#include <string>

namespace repeller {

/// Exponent left the representable range of XReal.
struct RangeError : std::range_error {
    using std::range_error::range_error;
};

/// An argument violated an operation's precondition.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Evaluation point coincides with a zero of f (log-derivative pole).
struct PoleError : DomainError {
    using DomainError::DomainError;
};

/// Scale sequence violates its structural invariants.
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numerical procedure (winding count, Newton) did not reach its target.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A contour passes through (or numerically touches) a solution.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested work exceeds the configured node budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A preimage tree with missing nodes was passed where a complete one is required.
struct PartialTreeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace repeller
