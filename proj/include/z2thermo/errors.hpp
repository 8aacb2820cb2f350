#pragma once

#include <stdexcept>
#include <string>

namespace z2thermo {

/// Malformed arguments: unknown DOF, duplicate factor, basis mismatch, bad parameters.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operator that should be a density matrix is not one (negative spectrum, bad trace).
class InvalidDensity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A support-restricted function was asked for on an operator with empty support.
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Two states that must share a support do not, or an expectation leaks outside it.
class SupportMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Independent numerical routes disagree beyond their abort threshold.
class NumericalInstability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The working precision cannot resolve every eigenvalue of the structural support.
class InsufficientPrecision : public NumericalInstability {
 public:
  using NumericalInstability::NumericalInstability;
};

}  // namespace z2thermo
