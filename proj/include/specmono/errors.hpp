#pragma once

#include <stdexcept>
#include <string>

namespace specmono {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model parameters, non-regular values, failed quadrature or inversion.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Point outside the domain of a chart or precondition on an argument violated.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Lattice detection failed: degenerate cloud, label conflict, rank deficiency.
class DetectError : public Error {
public:
    using Error::Error;
};

/// Transition snapping failed or a loop is not covered by overlapping charts.
class MonodromyError : public Error {
public:
    using Error::Error;
};

/// Malformed run configuration. Carries the 1-based line of the offending entry (0 if unknown).
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line) : Error(what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace specmono
