#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cardest {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input. line is 1-based, 0 when not tied to a line.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t line = 0)
        : Error(line ? msg + " (line " + std::to_string(line) + ")" : msg), line(line) {}
    std::size_t line;
};

struct IntegrityError : Error {
    using Error::Error;
};

struct OracleBudgetError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ResourceError : Error {
    using Error::Error;
};

}  // namespace cardest
