#pragma once

#include <stdexcept>
#include <string>

namespace collneg {

// Base of every error raised by the library. Callers that only want a
// diagnostic can catch this; tests match the concrete subclasses.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class NotHermitianError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class InvalidStateError : public Error {
public:
    using Error::Error;
};

// Denominator of the collective probability vanished for a configuration.
class MeasurementError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

class MetricsError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace collneg
