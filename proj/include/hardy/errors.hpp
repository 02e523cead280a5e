#ifndef HARDY_ERRORS_HPP
#define HARDY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hardy {

/// Base of every error raised by the library.
class HardyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live in incompatible spaces (vector dimension or ambient degree).
class DimensionMismatch : public HardyError {
public:
    using HardyError::HardyError;
};

/// An operation would have to drop nonzero coefficients beyond an ambient degree.
class TruncationOverflow : public HardyError {
public:
    using HardyError::HardyError;
};

/// Argument outside the domain of the operation (|z| > 1, zero outside the disc, ...).
class DomainError : public HardyError {
public:
    using HardyError::HardyError;
};

class PreconditionError : public HardyError {
public:
    using HardyError::HardyError;
};

/// A postcondition check on a computed object failed.
class CertificationFailure : public HardyError {
public:
    using HardyError::HardyError;
};

/// An internal invariant that the mathematics guarantees was found broken.
class InvariantViolation : public HardyError {
public:
    using HardyError::HardyError;
};

class ParseError : public HardyError {
public:
    using HardyError::HardyError;
};

} // namespace hardy

#endif // HARDY_ERRORS_HPP
