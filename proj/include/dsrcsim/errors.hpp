#pragma once

#include <stdexcept>
#include <string>

namespace dsrcsim {

// Bad configuration or malformed input file.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A simulation invariant was violated (collision, policy breach, ...).
// Aborts the replication that raised it.
struct InvariantError : std::runtime_error {
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dsrcsim
