#pragma once

#include <stdexcept>
#include <string>

namespace nla {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (range, unitarity, empty input).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Mode register problems: overlapping registers, unknown or reused labels.
class ModeError : public Error {
public:
    using Error::Error;
};

/// A basis state would exceed the configured total photon cutoff.
class CutoffOverflow : public Error {
public:
    using Error::Error;
};

/// A closed-form step hit a zero denominator; heralding cannot succeed.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Post-selection accepted (numerically) nothing.
class HeraldNeverSucceeds : public Error {
public:
    using Error::Error;
};

}  // namespace nla
