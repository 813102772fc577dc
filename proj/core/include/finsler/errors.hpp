#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

// Base of every error raised by the library. Each subtype maps to one failure
// class that callers (and the CLI exit-code logic) distinguish.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input outside an operation's domain: non-unit sphere point, zero vector
// for the fundamental tensor, mismatched endpoints, ...
class DomainError : public Error {
public:
    using Error::Error;
};

// A path segment is longer than the model's uniqueness radius.
class RefinementRequired : public Error {
public:
    using Error::Error;
};

class DegenerateIndex : public Error {
public:
    using Error::Error;
};

class BudgetError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

// Primitive decomposition could not decide between "repeats" and "does not".
class UndecidedError : public Error {
public:
    using Error::Error;
};

// The operation is not defined for this model (e.g. a sweepout on the torus).
class NotApplicable : public Error {
public:
    using Error::Error;
};

class BoundViolation : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace finsler
