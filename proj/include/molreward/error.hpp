#pragma once

#include <stdexcept>
#include <string>

namespace molreward {

// Raised for invalid or inconsistent configuration files. The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace molreward
