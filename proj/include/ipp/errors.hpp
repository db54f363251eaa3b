#pragma once

#include <stdexcept>
#include <string>

namespace ipp {

// Invalid argument to an operation (negative noise, odd branching, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Location outside the grid a field is defined on.
class DomainError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Malformed raster input; carries the 1-based line number where parsing failed.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad experiment configuration. key() names the offending config entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

}  // namespace ipp
