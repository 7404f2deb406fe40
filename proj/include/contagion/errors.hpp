#pragma once

#include <stdexcept>
#include <string>

namespace contagion {

/// Malformed or out-of-range input data (bad CSV rows, degenerate series, invalid flags).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integration or sampling failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or unwritable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace contagion
