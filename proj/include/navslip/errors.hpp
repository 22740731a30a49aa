#pragma once

#include <stdexcept>
#include <string>

namespace navslip {

// Base class for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or invalid user configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Data violating an operation's precondition (e.g. u3 != 0 at a wall).
class InputError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

// Too few usable points for a least-squares rate fit.
class FitError : public Error {
 public:
  using Error::Error;
};

class StepSizeError : public Error {
 public:
  using Error::Error;
};

// Numerical failure inside a linear solve.
class SolverError : public Error {
 public:
  using Error::Error;
};

class BlowUpError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace navslip
