#pragma once

#include <stdexcept>
#include <string>

namespace molsmooth {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-range argument to a numeric operation.
class InvalidInput : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// Blur-window calibration could not produce a usable window size.
class CalibrationError : public Error {
public:
  using Error::Error;
};

/// Caller broke an API precondition (e.g. asked for a focus position of a
/// molecule that is not part of the reaction).
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// File-system failure. The message always names the offending path.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace molsmooth
