#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace beliefsynth {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bayes denominator fell below the zero-likelihood threshold.
struct ZeroLikelihoodObservation : Error {
    ZeroLikelihoodObservation(std::size_t action, std::size_t observation, double denominator)
        : Error("zero-likelihood observation " + std::to_string(observation) + " under action "
                + std::to_string(action) + " (denominator " + std::to_string(denominator) + ")"),
          action(action), observation(observation), denominator(denominator) {}
    std::size_t action;
    std::size_t observation;
    double denominator;
};

/// Vector length does not match the model dimension it is used with.
struct DimensionMismatch : Error {
    DimensionMismatch(const std::string& where, std::size_t expected, std::size_t got)
        : Error(where + ": expected dimension " + std::to_string(expected) + ", got "
                + std::to_string(got)),
          expected(expected), got(got) {}
    std::size_t expected;
    std::size_t got;
};

/// Formula text failed to parse; offset is the byte position of the offending token.
struct SyntaxError : Error {
    SyntaxError(const std::string& message, std::size_t offset)
        : Error(message + " (byte " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

/// An identifier does not name a registered atomic proposition.
struct UnknownProposition : Error {
    explicit UnknownProposition(const std::string& name)
        : Error("unknown proposition '" + name + "'"), name(name) {}
    std::string name;
};

/// A temporal operator without a bound reached bounded evaluation.
struct UnboundedOperator : Error {
    explicit UnboundedOperator(const std::string& op)
        : Error("operator " + op + " carries no bound") {}
};

/// The trace is shorter than the formula's required horizon.
struct TraceTooShort : Error {
    TraceTooShort(std::size_t required, std::size_t got)
        : Error("trace of length " + std::to_string(got) + " is shorter than required "
                + std::to_string(required)),
          required(required), got(got) {}
    std::size_t required;
    std::size_t got;
};

/// A file does not follow the expected schema.
struct FormatError : Error {
    explicit FormatError(const std::string& what) : Error(what) {}
};

/// Structural invariants of a loaded object are violated.
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// A lasso run is not a connected run of the automaton.
struct InvalidRun : Error {
    explicit InvalidRun(const std::string& what) : Error(what) {}
};

/// Requested formula shape is outside the template library.
struct UnsupportedPattern : Error {
    explicit UnsupportedPattern(const std::string& what) : Error(what) {}
};

/// An evaluation touched an alpha-vector set with no members.
struct EmptySet : Error {
    explicit EmptySet(const std::string& what) : Error(what) {}
};

/// Stored successor samples are not reproducible from the claimed source.
struct InconsistentSamples : Error {
    explicit InconsistentSamples(const std::string& what) : Error(what) {}
};

/// A single record fails the reproducibility check at insertion.
struct InconsistentRecord : Error {
    explicit InconsistentRecord(const std::string& what) : Error(what) {}
};

/// Iteration budget exhausted before the residual dropped below tolerance.
struct NonConvergence : Error {
    NonConvergence(double residual, std::size_t sweeps)
        : Error("no convergence after " + std::to_string(sweeps) + " sweeps (residual "
                + std::to_string(residual) + ")"),
          residual(residual), sweeps(sweeps) {}
    double residual;
    std::size_t sweeps;
};

/// The safe action set at a queried product state is empty.
struct NoSafeAction : Error {
    explicit NoSafeAction(const std::string& what) : Error(what) {}
};

/// An epsilon move was requested at a state that does not offer it.
struct EpsilonUnavailable : Error {
    explicit EpsilonUnavailable(const std::string& what) : Error(what) {}
};

} // namespace beliefsynth
