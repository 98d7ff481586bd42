#pragma once

#include <stdexcept>
#include <string>

namespace dipolegate {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: out-of-domain parameters, malformed configuration, etc.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Two quantities (or a quantity and a unit) of different physical dimension.
class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class UnknownPreset : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class UnknownTransition : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A result is mathematically undefined for the given input (e.g. a relative
// error about a zero mean phase).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace dipolegate
