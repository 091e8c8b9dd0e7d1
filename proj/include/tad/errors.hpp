#pragma once

#include <stdexcept>
#include <string>

namespace tad {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A token is not a member of the vocabulary in use.
struct UnknownTokenError : Error {
    using Error::Error;
};

// A scoring model has no probability vector for a context and no fallback.
struct UndefinedContextError : Error {
    using Error::Error;
};

// An enumeration would exceed the configured sequence budget.
struct BudgetExceededError : Error {
    using Error::Error;
};

// Semantic entropy requested over a safe set with zero mass.
struct DegenerateSupportError : Error {
    using Error::Error;
};

// Greedy selection over an empty safe set.
struct EmptySafeSetError : Error {
    using Error::Error;
};

// Division by zero in a derived statistic (baseline denominator etc.).
struct DivisionByZeroError : Error {
    using Error::Error;
};

// Every pipeline stage reported zero service time.
struct AllZeroError : Error {
    using Error::Error;
};

// A document could not be parsed as a scenario / model / KB file.
struct ParseError : Error {
    using Error::Error;
};

// A parsed document violates a structural invariant.
struct ValidationError : Error {
    using Error::Error;
};

} // namespace tad
