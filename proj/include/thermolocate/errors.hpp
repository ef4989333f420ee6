#pragma once

#include <stdexcept>
#include <string>

namespace thermolocate {

// Invalid or inconsistent scenario configuration. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Missing or unreadable/unwritable files. CLI exit code 3.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Explicit-step stability bound violated. CLI exit code 4.
class StabilityError : public std::runtime_error {
public:
    explicit StabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Patch data inconsistent with its manifest. CLI exit code 5.
class DataMismatchError : public std::runtime_error {
public:
    explicit DataMismatchError(const std::string& msg) : std::runtime_error(msg) {}
};

// Every candidate was rejected; no reconstruction exists. CLI exit code 6.
class NoSolutionError : public std::runtime_error {
public:
    explicit NoSolutionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Adaptive quadrature failed to reach the requested tolerance. Carries the
// best estimate so callers can decide whether it is still usable.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& msg, double estimate, double last_delta)
        : std::runtime_error(msg), estimate_(estimate), last_delta_(last_delta) {}
    double estimate() const { return estimate_; }
    double last_delta() const { return last_delta_; }

private:
    double estimate_;
    double last_delta_;
};

}  // namespace thermolocate
