#pragma once

#include <stdexcept>

namespace bellvar {

// Input outside the mathematical domain of an operation: parameter out of
// range, non-physical density matrix, inconsistent decomposition.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Caller violated an operation's structural precondition (e.g. d != c for
// the perfectly-correlated evaluator, a bad split index).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace bellvar
