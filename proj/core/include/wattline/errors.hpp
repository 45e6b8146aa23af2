#pragma once

#include <stdexcept>
#include <string>

namespace wattline {

// Base for everything thrown by this library. The CLI maps each subclass
// to a distinct exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numeric precondition was violated (non-positive rate, negative work, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A name lookup failed (unknown ceiling, region, kernel).
class LookupError : public Error {
public:
    using Error::Error;
};

// A file or string did not match the expected schema. Carries the offending
// line number when one is known (0 otherwise).
class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error(msg) {}
    FormatError(std::size_t line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_ = 0;
};

// A power source could not be read (missing file, bad command output, ...).
class SourceError : public Error {
public:
    using Error::Error;
};

// A trace source ran past its last entry and the hold grace expired.
class SourceEnd : public SourceError {
public:
    using SourceError::SourceError;
};

// Sampler protocol misuse: nested regions, mismatched stop, double finalize.
class LifecycleError : public Error {
public:
    using Error::Error;
};

// Least-squares fitting failed: too few records or a rank-deficient design.
class FitError : public Error {
public:
    using Error::Error;
};

// A child process could not be spawned or exec'd.
class SpawnError : public Error {
public:
    using Error::Error;
};

} // namespace wattline
