#pragma once

#include <stdexcept>
#include <string>

namespace parti {

// Base of every domain error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Caller asked for something outside the contract (bad index, bad flag).
class UsageError : public Error {
public:
  using Error::Error;
};

// Cache does not cover the requested index; extend it first.
class CoverageError : public UsageError {
public:
  using UsageError::UsageError;
};

// Window length does not match the operator's arity.
class ArityError : public UsageError {
public:
  using UsageError::UsageError;
};

class FormatError : public Error {
public:
  using Error::Error;
};

class IntegrityError : public Error {
public:
  using Error::Error;
};

// Argument outside the mathematical domain (negative radicand, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

// A certificate step could not be established.
class VerificationError : public Error {
public:
  using Error::Error;
};

} // namespace parti
