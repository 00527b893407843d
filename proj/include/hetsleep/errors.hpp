#pragma once

#include <stdexcept>

namespace hetsleep {

// Malformed or unreadable configuration input.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A scenario invariant does not hold; the message names the violation.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Even the all-on mode exceeds the MBS transmit power cap.
struct InfeasibleScenario : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A root bracket failed to enclose a sign change.
struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Expected macro load is zero; the requested quantity is a 0/0 limit.
struct DegenerateLoad : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Instance exceeds a hard size cap (exhaustive search).
struct TooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hetsleep
