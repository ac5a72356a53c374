#pragma once

#include <stdexcept>
#include <string>

namespace mckv {

// Bad solver/scenario configuration (grid, CFL, missing fields, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A density failed validation (negative values, NaN, bad grid, mass > 1).
struct InvalidDensityError : std::runtime_error {
    explicit InvalidDensityError(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Tail inspection found a (numerically) divergent moment.
struct UnboundedMomentError : std::runtime_error {
    explicit UnboundedMomentError(const std::string& what) : std::runtime_error(what) {}
};

// The finite-difference scheme produced something it never should
// (e.g. negative density beyond tolerance). Distinct from a blow-up,
// which is a recorded event, not an error.
struct SchemeFailureError : std::runtime_error {
    explicit SchemeFailureError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mckv
