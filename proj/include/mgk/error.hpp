#pragma once

#include <stdexcept>
#include <string>

namespace mgk {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input parameter. `field()` names the offending field (dotted path
/// for config keys, e.g. "workload.alpha").
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Utilization at or above 1: no steady state exists.
class SaturationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace mgk
