#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cutvol {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Domain-level failures: the inputs describe a configuration the requested
// operation is not defined for.  The CLI maps these to exit code 2.
struct DomainError : Error {
    using Error::Error;
};

struct DegenerateHyperplane : DomainError {
    DegenerateHyperplane() : DomainError("hyperplane has zero normal (all a_i = 0)") {}
    using DomainError::DomainError;
};

// First three normal coefficients vanish: the plane contains no usable
// direction in the x-subspace.
struct VerticalDegenerate : DomainError {
    using DomainError::DomainError;
};

struct NonSmoothPoint : DomainError {
    using DomainError::DomainError;
};

struct NotATangency : DomainError {
    using DomainError::DomainError;
};

struct NonMorseTangency : DomainError {
    using DomainError::DomainError;
};

struct UnsupportedPsi : DomainError {
    using DomainError::DomainError;
};

struct InsufficientSamples : DomainError {
    using DomainError::DomainError;
};

struct TangencyInRegion : DomainError {
    using DomainError::DomainError;
};

struct NoiseFloor : DomainError {
    using DomainError::DomainError;
};

// Input-file problems.  The CLI maps these to exit code 1.
struct ParseError : Error {
    std::size_t line = 0;
    std::size_t column = 0;
    ParseError(const std::string& msg, std::size_t line_, std::size_t col_)
        : Error("parse error at line " + std::to_string(line_) + ", column " +
                std::to_string(col_) + ": " + msg),
          line(line_), column(col_) {}
};

struct InvalidPsi : ParseError {
    using ParseError::ParseError;
};

}  // namespace cutvol
