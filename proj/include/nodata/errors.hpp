#pragma once

#include <stdexcept>
#include <string>

namespace nodata {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration detected before any work was done.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or wire message.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Dataset generation could not satisfy the requested spec.
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace nodata
