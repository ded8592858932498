#pragma once

#include <stdexcept>
#include <string>

namespace spintrap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its admissible range (rates, step sizes, FID settings).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An argument is well-formed but the operation is undefined for it.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input documents (configuration, sequences).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace spintrap
