#pragma once

#include <stdexcept>
#include <string>

namespace mls {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OrderMismatch : public Error {
 public:
  using Error::Error;
};

class SingularLinearPart : public Error {
 public:
  using Error::Error;
};

/// Grazing contact, or a vanishing derivative in an implicit solve.
class TangencyError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class CodingMismatch : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

class GradingError : public Error {
 public:
  using Error::Error;
};

/// A computed quantity is outside its tolerance (CLI exit code 2).
class ToleranceError : public Error {
 public:
  using Error::Error;
};

}  // namespace mls
