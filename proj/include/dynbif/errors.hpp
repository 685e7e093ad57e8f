// Exception types shared by all modules.
#ifndef DYNBIF_ERRORS_HPP
#define DYNBIF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dynbif {

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// A stated hypothesis (monotone beta, (f2) certificate, ...) failed a check
// that an operation relies on as a precondition.
struct HypothesisViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Root bracketing ran off the end of the search window.
struct WindowExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Linearization has an eigenvalue below the hyperbolicity margin; the index
// is undefined at this parameter value.
struct NonHyperbolic : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegrationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An equilibrium sits too close to the isolating ball boundary.
struct IsolationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Index samples inside one gap disagree: truncation too small or a missed
// bifurcation value.
struct ContinuationViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dynbif

#endif
