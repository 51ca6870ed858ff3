#pragma once

#include <stdexcept>

namespace filament {

// Caller-side mistakes derive from std::logic_error; the CLI maps them to exit
// code 2. Everything derived from std::runtime_error maps to exit code 1.

class argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file could not be opened or read.
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Detector configuration violates the significance guard or is incomplete.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Problem size exceeds what an exact or exhaustive routine accepts.
class capacity_error : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed file content.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Monte Carlo estimator had no usable trials.
class estimation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace filament
