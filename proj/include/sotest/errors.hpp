#pragma once

#include <stdexcept>
#include <string>

namespace sotest {

// Bad user/config input: invalid profiles, mismatched fault/algorithm, infeasible constraints.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Sampling could not satisfy the model after the rejection cap.
struct GenerationError : std::runtime_error {
    explicit GenerationError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sotest
