#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

// Parameter outside the domain of an operation (p outside [0,1], p = 0 where an
// asymptote is requested, unnormalized coin, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A constructed object violates an algebraic invariant (e.g. Kraus completeness).
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Request exceeds a configured resource bound (density-oracle step limit).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Closed-form expression is singular at the requested parameters.
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qwalk
