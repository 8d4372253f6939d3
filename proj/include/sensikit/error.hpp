#pragma once

#include <stdexcept>
#include <string>

namespace sensikit {

/// Bad arguments or configuration: dimension mismatch, empty index set,
/// sample size too small, level outside (0,1).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The data cannot support the requested estimate: constant output, zero
/// denominators, non-finite transformed values.
class DegenerateData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sensikit
