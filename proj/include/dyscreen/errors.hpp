#pragma once

#include <stdexcept>
#include <string>

namespace dyscreen {

// Bad config file, bad CLI flags, or a CSV schema that does not match the
// column map. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class SchemaError : public ConfigError {
public:
    explicit SchemaError(const std::string& msg) : ConfigError(msg) {}
};

// Input data violates an operation's preconditions (empty dataset, single
// class, dimension mismatch, ...). CLI exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dyscreen
