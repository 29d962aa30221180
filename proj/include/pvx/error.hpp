#pragma once

#include <stdexcept>
#include <string>

namespace pvx {

// Thrown on malformed input files and broken stream state.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an operation's preconditions are violated.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace pvx
