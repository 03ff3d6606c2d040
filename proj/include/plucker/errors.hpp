#pragma once

#include <stdexcept>
#include <string>

namespace plucker {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Non-finite values or a broken structural precondition on an argument.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// Input for which the requested computation has no defined answer (zero data).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// An internal identity failed; indicates corrupted upstream data.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

class PoleError : public Error {
public:
    using Error::Error;
};

class NotApplicableError : public Error {
public:
    using Error::Error;
};

class RngError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace plucker
