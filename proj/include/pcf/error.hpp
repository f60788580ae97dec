#pragma once
#include <stdexcept>
#include <string>

namespace pcf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input: bad permutation, nonpositive weight, index out of range.
struct ConfigError : Error {
    using Error::Error;
};

// A structure or operator failed one of its axioms.
struct ValidationError : Error {
    using Error::Error;
};

// Singular interior block in a Schur complement.
struct PoleError : Error {
    using Error::Error;
};

// Problem too large for the dense path.
struct CeilingError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

} // namespace pcf
