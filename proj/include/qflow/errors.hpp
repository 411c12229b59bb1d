#pragma once

#include <stdexcept>
#include <string>

namespace qflow {

// Base class for every error raised by the library. Numerical gates that fail
// (Gram residual, truncation tails, quadrature overflow) throw rather than
// returning degraded data.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotSymplectic : public Error {
 public:
  using Error::Error;
};

class IllConditioned : public Error {
 public:
  using Error::Error;
};

class DegenerateFixedPoint : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical adequacy gate failed; `residual` carries the offending value.
class GateFailure : public Error {
 public:
  GateFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace qflow
