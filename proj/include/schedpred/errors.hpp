#pragma once

#include <stdexcept>

namespace schedpred {

/// Instance data that violates a structural invariant (mixed prediction
/// modes, bad ids, out of range values).
class InvalidInstance : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A policy was asked to act in a state with nothing left to do.
class TerminalState : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A policy returned an action that is illegal in the observed state.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Input outside what an algorithm supports (release dates for WSPT,
/// three or more weights for WSRPT).
class UnsupportedInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Exhaustive searches refuse instances above their configured size bound.
class ResourceLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace schedpred
