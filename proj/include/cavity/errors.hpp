#pragma once

#include <stdexcept>
#include <string>

namespace cavity {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document or bad user-supplied value (CLI exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// JSON parse failure; carries the 1-based line of the offending byte.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, int line)
      : ValidationError(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Self-intersecting polygons, aperture not on the ground line, mesher failure.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Point outside the meshed domain.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace cavity
