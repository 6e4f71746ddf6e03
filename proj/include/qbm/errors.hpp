#pragma once

#include <stdexcept>
#include <string>

namespace qbm {

/// Input outside the domain of a mathematical operation (pole of a kernel,
/// negative time, asymmetric system handed to a symmetric-only routine, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure did not reach its accuracy target or detected an
/// internal inconsistency.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qbm
