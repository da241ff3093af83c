#ifndef FAMREC_ERROR_HPP_
#define FAMREC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace famrec {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// Bad invocation or configuration (CLI exit code 1).
class UsageError : public Error {
public:
    explicit UsageError(const std::string& message) : Error(message) {}
};

/// Input data violates a schema or domain invariant (CLI exit code 2).
class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error(message) {}
};

/// Internal contract broken between modules (CLI exit code 3).
class InvariantError : public Error {
public:
    explicit InvariantError(const std::string& message) : Error(message) {}
};

} // namespace famrec

#endif // FAMREC_ERROR_HPP_
