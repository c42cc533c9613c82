#pragma once

#include <stdexcept>
#include <string>

namespace uc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape, variance or dimension mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Point or parameter outside the domain where an object is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Integration or quadrature that could not reach the requested accuracy.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace uc
