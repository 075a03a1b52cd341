#pragma once

#include <stdexcept>
#include <string>

namespace radgas {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid physical input (non-positive v or theta, negative rate, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// Mismatched field/grid sizes or empty inputs.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(what) {}
};

/// Bad configuration (syntax, unknown key, range violation).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Malformed checkpoint or CSV input.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(what) {}
};

/// Positivity loss or NaN during time stepping; carries failure location.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, double t, std::size_t node)
        : Error(what), t(t), node(node) {}
    double t;
    std::size_t node;
};

/// Linear algebra failure (zero pivot in a tridiagonal solve).
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what) {}
};

/// Too few records/snapshots for a trajectory diagnostic.
class InsufficientDataError : public Error {
public:
    explicit InsufficientDataError(const std::string& what) : Error(what) {}
};

} // namespace radgas
