#pragma once

#include <stdexcept>
#include <string>

namespace hypegrl {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data or unreadable/unwritable files.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters, config keys or command usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Points off the manifold, dimension mismatches.
class GeometryError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace hypegrl
