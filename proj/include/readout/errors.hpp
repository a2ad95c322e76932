#pragma once

#include <stdexcept>
#include <string>

namespace readout {

/// Base class for everything this library throws.
class ReadoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invariant-violating configuration input.
class ConfigError : public ReadoutError {
 public:
  using ReadoutError::ReadoutError;
};

/// A model evaluated outside the region where it is defined (dispersive pole,
/// frequency outside the relaxation table, MIST model below the resonator).
class DomainError : public ReadoutError {
 public:
  using ReadoutError::ReadoutError;
};

/// Integration step too coarse for the resonator dynamics.
class StepSizeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Every candidate of a brute-force search was infeasible.
class InfeasibleError : public ReadoutError {
 public:
  using ReadoutError::ReadoutError;
};

class IoError : public ReadoutError {
 public:
  using ReadoutError::ReadoutError;
};

}  // namespace readout
