#pragma once

#include <stdexcept>
#include <string>

namespace thetawh {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation too close to a pole of the function being evaluated.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A series could not reach the requested accuracy within its term budget.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved_bound)
      : Error(what), achieved_bound_(achieved_bound) {}
  double achieved_bound() const noexcept { return achieved_bound_; }

 private:
  double achieved_bound_;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// An invariant that holds mathematically was violated numerically; this
/// points at a bug in exponent evaluation or root refinement.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// No asymptotic root expansion is known for the requested regime.
class UnsupportedRegime : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input validation failure; carries the offending field name.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace thetawh
