#pragma once

#include <stdexcept>
#include <string>

namespace tandem {

/// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed config, unbound placeholder, precondition violation.
/// The CLI maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A backend could not produce a completion: transport failure after retries,
/// exhausted script, unregistered backend. CLI exit code 3.
class BackendError : public Error {
public:
    BackendError(std::string backend, const std::string& what)
        : Error(backend + ": " + what), backend_(std::move(backend)) {}

    const std::string& backend() const { return backend_; }

private:
    std::string backend_;
};

/// Unparseable structured output where silence is not acceptable (judge verdicts).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A price or parameter-count table is missing an entry for a backend the
/// transcript used. Carries the offending backend name.
class CoverageError : public Error {
public:
    CoverageError(std::string backend, const std::string& what)
        : Error(what + " (backend: " + backend + ")"), backend_(std::move(backend)) {}

    const std::string& backend() const { return backend_; }

private:
    std::string backend_;
};

}  // namespace tandem
