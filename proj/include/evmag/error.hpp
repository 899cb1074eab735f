#pragma once

#include <stdexcept>
#include <string>

namespace evmag {

// Raised when an argument violates a documented precondition or type invariant.
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// Raised for file system and codec failures.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace evmag
