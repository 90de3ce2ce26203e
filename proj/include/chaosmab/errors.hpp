#pragma once

#include <stdexcept>
#include <string>

namespace chaosmab {

// Invalid configuration or parameters (CLI exits with code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime/data failure: bad trace files, degenerate inputs (CLI exit code 3).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chaosmab
