#pragma once

#include <stdexcept>
#include <string>

namespace dmca {

// Base of every error raised by the library. The CLI maps each subclass to a
// machine-parsable kind tag via kind().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid-argument"; }
};

// Violated precondition between two library values (e.g. dimension mismatch).
class ContractViolation : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "contract-violation"; }
};

class ParseError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parse-error"; }
};

class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation-error"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io-error"; }
};

// Bad command-line usage; the CLI exits with status 2.
class UsageError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "usage"; }
};

class GenerationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "generation-error"; }
};

}  // namespace dmca
