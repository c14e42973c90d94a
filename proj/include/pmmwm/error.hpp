#pragma once

#include <stdexcept>
#include <string>

namespace pmmwm {

// Each error class maps to one CLI exit code (see exit_code()).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

class ParseError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

class InfeasibleInstance : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

// Raised by the matcher when the available edges admit no perfect matching on U.
class NoPerfectMatching : public InfeasibleInstance {
public:
    using InfeasibleInstance::InfeasibleInstance;
};

class CapacityInfeasible : public InfeasibleInstance {
public:
    using InfeasibleInstance::InfeasibleInstance;
};

class SpecInvalid : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class TooLarge : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 5; }
};

class IoError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 6; }
};

// Internal consistency failure (invariant scan in checked builds).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace pmmwm
