#pragma once

#include <stdexcept>
#include <string>

namespace etas {

// Precondition and validation failures throw std::invalid_argument.
// The two types below cover the remaining error categories surfaced by the CLI.

/// File could not be opened, read, parsed, or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical breach: non-positive intensity, failed root search, underflow, non-convergence.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace etas
