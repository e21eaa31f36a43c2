#pragma once

#include <stdexcept>
#include <string>

namespace fairprice {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix sizes disagree (policy vs grid, LP rows vs objective, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A conditional expectation was requested with zero conditioning mass.
class UndefinedConditionalError : public Error {
 public:
  using Error::Error;
};

class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A closed-form expression was evaluated at one of its poles.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// propose/observe were called out of order.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// The agent has consumed its whole horizon.
class ExhaustedError : public Error {
 public:
  using Error::Error;
};

/// Observed demand at the highest price is zero, so no positive floor exists.
class DegenerateDemandError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration document. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line = 0, std::string field = {})
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line),
        field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace fairprice
