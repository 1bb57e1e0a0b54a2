#ifndef CONTEXTURE_ERROR_HPP
#define CONTEXTURE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace contexture {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the caller's input was violated (bad size, range, format).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A computation could not produce a finite or well-defined result.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An encoder violates the orthonormality constraint an objective requires.
class ConstraintViolation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Gradient descent stopped making progress; carries the objective trace.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, std::vector<double> trace)
        : NumericalError(what), trace_(std::move(trace)) {}

    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

/// Filesystem read or write failure; the message names the path.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace contexture

#endif // CONTEXTURE_ERROR_HPP
