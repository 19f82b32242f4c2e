#pragma once

#include <stdexcept>
#include <string>

namespace nlpricing {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain (negative quantity, a1 out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A proposition hypothesis does not hold; carries the failed bullet verbatim.
class PreconditionError : public Error {
 public:
  PreconditionError(std::string hypothesis, const std::string& detail)
      : Error(detail + " (failed hypothesis: " + hypothesis + ")"),
        hypothesis_(std::move(hypothesis)) {}
  const std::string& hypothesis() const { return hypothesis_; }

 private:
  std::string hypothesis_;
};

// The cutoff map q -> theta is not nondecreasing on the checked grid.
class NonmonotoneCutoffError : public Error {
 public:
  using Error::Error;
};

// Consumer demand could not be bracketed below the quantity cap.
class UnboundedDemandError : public Error {
 public:
  using Error::Error;
};

// q* is infinite where a finite integration domain is required.
class UnboundedDomainError : public Error {
 public:
  using Error::Error;
};

// A custom perception kernel violates the linear-mean assumption.
class AssumptionViolationError : public Error {
 public:
  using Error::Error;
};

// FOC residuals requested for a zero-trade scheme (q* = 0).
class DegenerateSchemeError : public Error {
 public:
  using Error::Error;
};

// Euler-Lagrange residual requested at (or too close to) a tariff kink.
class KinkError : public Error {
 public:
  using Error::Error;
};

// Block-tariff comparison called outside the supported price regime.
class RegimeError : public Error {
 public:
  using Error::Error;
};

// Closed form and independent numerical route disagree beyond tolerance.
class OracleDisagreementError : public Error {
 public:
  using Error::Error;
};

// Configuration file missing, malformed, or semantically invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlpricing
