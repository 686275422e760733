#pragma once

#include <stdexcept>
#include <string>

namespace romlab {

// invalid user-facing configuration (CLI exit code 2)
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// numerical failure at run time: divergence, CFL violation, solver breakdown
// (CLI exit code 3)
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace romlab
