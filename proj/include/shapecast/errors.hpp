#pragma once

#include <stdexcept>
#include <string>

namespace shapecast {

// Bad input data or configuration: maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public ValidationError {
public:
    ParseError(const std::string& path, long line, const std::string& msg)
        : ValidationError(path + ":" + std::to_string(line) + ": " + msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Engine bug (e.g. solver failed to converge): maps to CLI exit code 2.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace shapecast
