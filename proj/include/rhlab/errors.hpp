#pragma once

#include <stdexcept>
#include <string>

namespace rhlab {

/// Argument outside an operation's domain.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative kernel failed to reach its tolerance.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied recurrence left the region where the comparison lemma applies.
class ModelViolationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Insertion into a table that has no free slot left.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Probe budget exhausted while inserting; never expected for alpha < 1.
class LivelockError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rhlab
