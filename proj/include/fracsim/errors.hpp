#pragma once

#include <stdexcept>
#include <string>

namespace fracsim {

/// Invalid geometry, scenario or mesh configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Out-of-domain numeric input to a formula.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Assembly, factorization or convergence failure.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fracsim
