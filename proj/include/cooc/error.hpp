#pragma once

#include <stdexcept>
#include <string>

namespace cooc {

/// Bad input data or a failed runtime step (CLI exit code 1).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter that violates a precondition (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cooc
