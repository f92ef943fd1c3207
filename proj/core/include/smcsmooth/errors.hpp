#pragma once

#include <stdexcept>
#include <string>

namespace smc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All potentials at some time step are zero (or -inf in log space).
class DegenerateWeightsError : public Error {
 public:
  using Error::Error;
};

/// A NaN or infinity reached a place where a finite value is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The model lacks a capability (transition density, proposal, coupler) the
/// requested algorithm needs.
class UnsupportedOperationError : public Error {
 public:
  using Error::Error;
};

/// A transition density exceeded the upper bound the model advertised.
class BoundViolationError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// Offline smoothing would store more particle coordinates than allowed.
class StorageBudgetError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace smc
