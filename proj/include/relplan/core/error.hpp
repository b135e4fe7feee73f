#pragma once

#include <stdexcept>
#include <string>

namespace relplan {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or conflicting declarations (predicates, schemas, arities).
struct DeclarationError : Error {
    using Error::Error;
};

/// A configured resource cap would be exceeded (enumeration, state space).
struct ResourceError : Error {
    using Error::Error;
};

/// Invalid run configuration (unknown generator, bad parameter ranges).
struct ConfigError : Error {
    using Error::Error;
};

/// Failure while evaluating an expression or policy (unbound variable, ...).
struct EvaluationError : Error {
    using Error::Error;
};

/// Action selection asked to choose from an empty candidate set.
struct SelectionError : Error {
    using Error::Error;
};

} // namespace relplan
