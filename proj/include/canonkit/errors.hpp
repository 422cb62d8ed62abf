#pragma once

#include <stdexcept>
#include <string>

namespace canonkit {

// Exit codes of the command-line tool map onto these categories.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const = 0;
};

class InputError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 2; }
};

class DegeneracyError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 3; }
};

class DivergenceError : public DegeneracyError {
public:
    using DegeneracyError::DegeneracyError;
};

class InternalError : public DegeneracyError {
public:
    using DegeneracyError::DegeneracyError;
};

class ConstraintError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 4; }
};

class InconsistentBoundaryError : public ConstraintError {
public:
    using ConstraintError::ConstraintError;
};

}  // namespace canonkit
