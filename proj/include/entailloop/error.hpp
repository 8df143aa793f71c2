#pragma once

#include <stdexcept>
#include <string>

namespace entailloop {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration. The CLI maps this to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed, inconsistent or unusable data. The CLI maps this to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace entailloop
