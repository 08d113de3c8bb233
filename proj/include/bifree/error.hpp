#pragma once

#include <stdexcept>
#include <string>

namespace bifree {

/// Raised for malformed input, violated preconditions, and exceeded caps.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bifree
