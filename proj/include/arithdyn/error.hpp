#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arithdyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated (zero where nonzero required, too few points, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A computed degree would exceed the configured degree cap.
class DegreeCapError : public Error {
public:
    using Error::Error;
};

/// An iterative numerical method failed to reach its target accuracy.
class NonConvergenceError : public Error {
public:
    using Error::Error;
};

/// A non-archimedean orbit could be classified neither as escaping nor as bounded.
class UndecidedBranchError : public Error {
public:
    using Error::Error;
};

/// Text input could not be parsed; carries the byte offset of the failure.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace arithdyn
