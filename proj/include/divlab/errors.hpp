#pragma once

#include <stdexcept>
#include <string>

namespace divlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain a table or handle covers.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Mismatched or invalid arguments (wrong k, too few samples, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Corrupt or truncated cache file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Cache file written by an unsupported version or for an unsupported order.
class VersionError : public Error {
 public:
  using Error::Error;
};

/// Requested accuracy cannot be reached at the working precision.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// Allocation would exceed the configured memory budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace divlab
