#pragma once

#include <stdexcept>
#include <string>

namespace schemaforge {

/// Instance exceeds an enumeration or census cap; the CLI maps this to
/// exit code 3.
class CapError : public std::runtime_error {
public:
    explicit CapError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid experiment configuration; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace schemaforge
