#pragma once

#include <stdexcept>
#include <string>

namespace theta {

struct InvalidTheta : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MalformedBlock : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownPoint : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct UnsupportedEdgeCount : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotDivisible : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// parse errors carry the 1-based source line
struct SyntaxError : std::runtime_error {
    int line;
    SyntaxError(int line_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

struct ArityMismatch : SyntaxError {
    using SyntaxError::SyntaxError;
};

struct PointOutOfRange : SyntaxError {
    using SyntaxError::SyntaxError;
};

struct NotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Unprovidable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooManyNewPoints : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotInSpectrum : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlanningFailure : std::logic_error {
    using std::logic_error::logic_error;
};

struct IngredientMissing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// post-execution self-check failed: always a bug, never user error
struct VerificationFailure : std::logic_error {
    using std::logic_error::logic_error;
};

struct InfeasibleArity : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BudgetExhausted : std::runtime_error {
    long long best_cost;
    BudgetExhausted(const std::string& what_, long long best)
        : std::runtime_error(what_ + " (best cost " + std::to_string(best) + ")"),
          best_cost(best) {}
};

} // namespace theta
