#pragma once

#include <stdexcept>
#include <string>

namespace medsynth {

// Bad pool/range/threshold values in a loaded configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Referenced asset missing or structurally unusable.
struct AssetError : std::runtime_error {
  explicit AssetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Inputs violate a documented contract (duplicate ids, foreign frames, ...).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace medsynth
