#pragma once

#include <stdexcept>
#include <string>

namespace sturmcont {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A banded factorization met a zero pivot, even after the diagonal shift.
class SingularJacobian : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class StartNotConverged : public Error {
 public:
  using Error::Error;
};

class InsufficientTail : public Error {
 public:
  using Error::Error;
};

class StepSizeCollapse : public Error {
 public:
  using Error::Error;
};

}  // namespace sturmcont
