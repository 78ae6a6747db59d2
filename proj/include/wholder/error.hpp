#pragma once

#include <stdexcept>
#include <string>

namespace wholder {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, windows or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Extrapolated boundary limits failed the Cauchy test.
class NoLimitError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

class TooFewRungsError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class UnknownCheckError : public Error {
 public:
  using Error::Error;
};

}  // namespace wholder
