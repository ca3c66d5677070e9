#pragma once

#include <stdexcept>
#include <string>

namespace refertriage {

// Malformed or inconsistent input data (files, rows, counts). CLI exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A caller violated an operation's precondition. CLI exit code 2.
class InvalidArgument : public std::runtime_error {
public:
    explicit InvalidArgument(const std::string& what) : std::runtime_error(what) {}
};

} // namespace refertriage
