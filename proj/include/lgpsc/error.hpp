#pragma once

#include <stdexcept>
#include <string>

namespace lgpsc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sizes that do not fit together (d > n, mismatched lengths, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or otherwise malformed numeric input.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A configuration value outside its domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input that is well formed but makes the requested model undefined.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lgpsc
