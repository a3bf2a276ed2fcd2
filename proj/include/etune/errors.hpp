#pragma once

#include <stdexcept>
#include <string>

namespace etune {

// Base class for every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed user input (operator strings, schedule JSON, CLI values).
class ParseError : public Error {
public:
    using Error::Error;
};

// A domain object violates its invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Fewer legal schedules exist than were requested.
class SpaceExhausted : public Error {
public:
    using Error::Error;
};

// Schedule does not satisfy the divisibility / block-size rules for the operator.
class IllegalSchedule : public Error {
public:
    using Error::Error;
};

// Loop-nest interpreter invoked above its size cap.
class TooLarge : public Error {
public:
    using Error::Error;
};

// Measured energy must be strictly positive.
class NonPositiveEnergy : public Error {
public:
    using Error::Error;
};

// Not enough samples to train a model.
class InsufficientData : public Error {
public:
    using Error::Error;
};

// Feature schema of the input does not match the model.
class SchemaMismatch : public Error {
public:
    using Error::Error;
};

// Serialized file carries an unsupported format version.
class VersionMismatch : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

// Filesystem or serialization failure.
class IoError : public Error {
public:
    using Error::Error;
};

// Stored data contradicts a checked identity (e.g. energy != power * latency).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

// Backend cannot perform measurements (the real-hardware stub always throws this).
class BackendUnavailable : public Error {
public:
    using Error::Error;
};

// Replay backend has no record for the requested candidate.
class TraceMiss : public Error {
public:
    using Error::Error;
};

} // namespace etune
