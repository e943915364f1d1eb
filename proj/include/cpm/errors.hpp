#pragma once

#include <stdexcept>
#include <string>

namespace cpm {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Evaluation point outside the open spectral support of a family.
class SupportError : public DomainError {
public:
    using DomainError::DomainError;
};

// A numerical procedure did not reach its stated accuracy.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested combination has no implementation (e.g. cg21 coefficients at beta != 2).
class UnsupportedError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace cpm
