#pragma once

#include <stdexcept>
#include <string>

namespace pucci {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A mathematical function was evaluated outside its domain.
class DomainError : public Error {
public:
    DomainError(const std::string& what, std::string subexpr = {}, double argument = 0.0)
        : Error(what), subexpr_(std::move(subexpr)), argument_(argument) {}

    const std::string& subexpr() const noexcept { return subexpr_; }
    double argument() const noexcept { return argument_; }

private:
    std::string subexpr_;
    double argument_;
};

/// exp(G) left the double range while building the transform.
class OverflowError : public Error {
public:
    OverflowError(const std::string& what, double threshold)
        : Error(what), threshold_(threshold) {}

    /// Abscissa t where G(t) passed the overflow guard.
    double threshold() const noexcept { return threshold_; }

private:
    double threshold_;
};

/// A bisection could not be started because both ends behave alike.
class BracketError : public Error {
public:
    using Error::Error;
};

}  // namespace pucci
