#pragma once

#include <stdexcept>
#include <string>

namespace screenlap {

// Rejected input: preconditions on dimensions, ranges, or file schemas.
class input_error : public std::invalid_argument {
public:
    explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

// A configured budget (term count, parameter search) was exceeded.
class capacity_error : public std::runtime_error {
public:
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// A requested tolerance could not be certified.
class certification_error : public std::runtime_error {
public:
    explicit certification_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace screenlap
