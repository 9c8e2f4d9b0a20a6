#pragma once

#include <stdexcept>
#include <string>

namespace mrc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible tensor shapes or parameter layouts.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation (log of x <= 0,
// fully masked softmax row, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite values produced during a forward pass or a probe.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed input files or records.
class DataError : public Error {
 public:
  using Error::Error;
};

// Misuse of an API in a way that is not a data problem (e.g. calling
// backward twice on the same tape).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrc
