#pragma once

#include <stdexcept>
#include <string>

namespace singosc {

/// Argument outside the mathematical domain of a routine (x <= 0 for log_gamma,
/// |z| >= 1 for power-Gaussian states, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A request that falls outside every validated evaluation regime, e.g. an
/// alpha-state with 50 < d < 1000, or an adiabatic expansion outside its
/// smallness condition.
class RegimeError : public DomainError {
 public:
  explicit RegimeError(const std::string& what) : DomainError(what) {}
};

/// Numerical failure during integration (step-size underflow, lost normalization).
class IntegrationError : public std::runtime_error {
 public:
  explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace singosc
