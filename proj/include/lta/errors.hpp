#pragma once

#include <stdexcept>
#include <string>

namespace lta {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad user input: missing files, malformed records, dimension mismatches.
// The CLI maps these to exit code 2; any other exception is an internal
// failure and maps to exit code 3.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(what) {}
};

}  // namespace lta
