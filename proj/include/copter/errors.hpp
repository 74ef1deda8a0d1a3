#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace copter {

// Base class for all recoverable errors raised by the library. The CLI maps
// these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file content.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("parse error at line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// An edge references a node or schedule that does not exist.
class DanglingReference : public Error {
 public:
  using Error::Error;
};

// A structural invariant of a loaded object does not hold.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// A scheduled edge has no remaining departure at the requested time.
class NoService : public Error {
 public:
  using Error::Error;
};

// Mode-regex text is not well formed.
class RegexSyntaxError : public Error {
 public:
  RegexSyntaxError(std::size_t position, const std::string& reason)
      : Error("regex syntax error at position " + std::to_string(position) +
              ": " + reason),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// No language element is eligible for a candidate mode set.
class EmptyLanguage : public Error {
 public:
  using Error::Error;
};

// A cost weight names an evaluative function that is not defined.
class UnknownEvaluative : public Error {
 public:
  using Error::Error;
};

// Attribute or feature vectors do not conform to the declared schema.
class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

// Likelihood fitting detected perfect separation (unbounded parameters).
class Degenerate : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// Logistic fitting detected perfect separation.
class Separable : public Error {
 public:
  using Error::Error;
};

// Logistic fitting requires both outcome values to be present.
class AllSameOutcome : public Error {
 public:
  using Error::Error;
};

class InsufficientTrials : public Error {
 public:
  using Error::Error;
};

class EmptySource : public Error {
 public:
  using Error::Error;
};

// Bad configuration value or unknown configuration key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace copter
