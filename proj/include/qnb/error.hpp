// qnb/error.hpp - exception types shared by every module
#pragma once

#include <stdexcept>
#include <string>

namespace qnb {

/// Thrown when an argument violates an operation's precondition.
class parameter_error : public std::invalid_argument {
 public:
  explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a scheme has no implementation for the requested route
/// (e.g. the dual route for exact-length runs).
class unsupported_scheme : public std::logic_error {
 public:
  explicit unsupported_scheme(const std::string& what) : std::logic_error(what) {}
};

/// Thrown by the brute-force and enumeration oracles when an instance is too large.
class size_guard_error : public std::length_error {
 public:
  explicit size_guard_error(const std::string& what) : std::length_error(what) {}
};

}  // namespace qnb
