#pragma once

#include <stdexcept>
#include <string>

namespace corrkit {

// Error taxonomy mirrors the CLI exit codes: input/config problems (1),
// numerical failures (2), network failures (3).
struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NetworkError : std::runtime_error {
  explicit NetworkError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace corrkit
