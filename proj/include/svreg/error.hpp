#pragma once
#include <stdexcept>
#include <string>

namespace svreg {

// Base of every error thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Violated precondition on arguments (bad index, negative threshold, ...).
class InvalidArgument : public Error
{
public:
    using Error::Error;
};

// Malformed or inconsistent input data (CSV, group specs, dimensions).
class DataError : public Error
{
public:
    using Error::Error;
};

// Numerical breakdown during fitting (non-finite objective, singular systems).
class NumericError : public Error
{
public:
    using Error::Error;
};

} // namespace svreg
