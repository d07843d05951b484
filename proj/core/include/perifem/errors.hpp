#pragma once

#include <stdexcept>
#include <string>

namespace perifem {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument to a numerical routine (zero bond vector, nonpositive
/// bond length, horizon larger than the domain, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration. Maps to exit code 2.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Linear solver or eigenvalue estimator failure. Maps to exit code 3.
class SolverError : public Error {
public:
  using Error::Error;
};

/// Time stepper detected unbounded growth. Maps to exit code 4.
class InstabilityError : public SolverError {
public:
  InstabilityError(const std::string& what, int step, double max_abs_u)
      : SolverError(what), step(step), max_abs_u(max_abs_u) {}
  int step;
  double max_abs_u;
};

} // namespace perifem
