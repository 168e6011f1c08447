#pragma once
#include <stdexcept>
#include <string>

namespace airnet {

// Input/format problems: bad files, missing columns, unknown ids.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical trouble: divergence, truncation overflow, unstable integration.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration or parameter values (violated preconditions).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace airnet
