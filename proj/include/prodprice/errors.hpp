#pragma once

#include <stdexcept>
#include <string>

namespace prodprice {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which standing assumption of the model a problem violates.
enum class Assumption {
  kBetaNonPositive,
  kZeroNotInQ,
  kZeroNotInA,
  kQOnlyZero,
  kAOnlyZero,
  kBadControlSet,
  kRayNotAllowedForQ,
  kBadTable,
  kTableDoesNotCover,
  kRevenueNonzeroAtZero,
  kRevenueNegative,
  kCostNegative,
  kCostDecreasing,
  kCostNotCoercive,
};

const char* to_string(Assumption a);

class AssumptionViolation : public Error {
 public:
  AssumptionViolation(Assumption reason, const std::string& detail)
      : Error(std::string(to_string(reason)) + (detail.empty() ? "" : ": " + detail)),
        reason_(reason) {}
  Assumption reason() const { return reason_; }

 private:
  Assumption reason_;
};

class CoercivityUndetectable : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DegenerateGrid : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class TruncationFailed : public Error {
 public:
  using Error::Error;
};

class DecompositionMismatch : public Error {
 public:
  using Error::Error;
};

class StateViolation : public Error {
 public:
  StateViolation(double time, double inventory)
      : Error("inventory " + std::to_string(inventory) + " below zero at t=" +
              std::to_string(time)),
        time_(time),
        inventory_(inventory) {}
  double time() const { return time_; }
  double inventory() const { return inventory_; }

 private:
  double time_;
  double inventory_;
};

class HorizonTooShort : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

}  // namespace prodprice
