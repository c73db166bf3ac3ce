#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hcl {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid argument values or violated operation preconditions.
struct DomainError : Error {
    using Error::Error;
};

// Malformed input text (XYZ files, JSON configs). Carries a 1-based line
// number when one is known; 0 means "not line-addressable".
struct ParseError : Error {
    std::size_t line = 0;
    ParseError(const std::string& msg, std::size_t line_no = 0)
        : Error(line_no ? "line " + std::to_string(line_no) + ": " + msg : msg), line(line_no) {}
};

// Filesystem failures: missing inputs, unwritable outputs.
struct IoError : Error {
    using Error::Error;
};

// Numeric breakdown (underflow, non-finite intermediates, non-convergence
// where convergence is required).
struct NumericError : Error {
    using Error::Error;
};

}  // namespace hcl
