// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cidcassi {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameter or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Value outside the domain a type requires (negative radiance, NaN, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Zero intensity met with epsilon = 0 during decomposition.
class DivisionHazardError : public Error {
 public:
  using Error::Error;
};

/// A dense oracle was asked for a matrix larger than its cap.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// Statistics undefined for the input, e.g. a zero-variance band.
class StatisticsError : public Error {
 public:
  using Error::Error;
};

/// The solver's residual blew past the divergence guard.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Two numerical routes that must agree did not.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents; the message carries the byte offset.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure (open, write, rename).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cidcassi
