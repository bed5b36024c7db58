#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reachtree {

// Stream/fixture parse failure. Carries the 1-based line number so callers
// (CLI, replay reports) can point at the offending input line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::string field, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", " + field + ": " + message),
          line_(line),
          field_(std::move(field)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

// Invalid run configuration; message lists the offending field(s).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A recording cannot be replayed (e.g. degenerate joints in a frame).
class ReplayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace reachtree
