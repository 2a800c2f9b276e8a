#pragma once

#include <stdexcept>
#include <string>

namespace ctxsearch {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened or read.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Malformed input. `location()` is the 1-based line or record number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : Error(what + " (at " + std::to_string(location) + ")"), location_(location) {}

  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

/// Well-formed input that violates a precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A referenced object (session, user) does not exist.
class NotFoundError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A write to a persistent store failed; the write did not happen.
class StorageError : public Error {
 public:
  using Error::Error;
};

/// An operation was attempted in a session state that does not permit it.
class StateError : public Error {
 public:
  using Error::Error;
};

/// An external search engine failed (timeout, remote error, bad reply).
class AdapterError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctxsearch
