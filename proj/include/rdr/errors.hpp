#pragma once

#include <stdexcept>
#include <string>

namespace rdr {

// Base of every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: parameters, configs, ranges. CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class RangeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class MissingTemperature : public ConfigError {
 public:
  MissingTemperature() : ConfigError("device has no bath temperature") {}
};

// Numerical failures that depend on where the model is evaluated. CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Pivot below singular_tol * max|entry|. In the scattering problems this means
/// omega sits on an undamped pole; perturb omega and retry.
class SingularMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PoleAtFrequency : public NumericalError {
 public:
  explicit PoleAtFrequency(double omega);
  double omega() const { return omega_; }

 private:
  double omega_;
};

class ZeroGain : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BadLength : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TooShort : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoFlipInRange : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rdr
