#pragma once

#include <stdexcept>
#include <string>

namespace flexflip {

/// Requested contact #2 position lies outside the rod's reachable half-disk.
class UnreachableEndpoint : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An operation that needs a converged equilibrium received an unconverged one.
class UnconvergedSolution : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Least-squares line requested from points that share a single z value.
class DegenerateFit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoSuccesses : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or missing run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace flexflip
