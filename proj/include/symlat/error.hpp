#pragma once

#include <stdexcept>
#include <string>

namespace symlat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two partitions, graphs or groups were combined over different ground sets.
class GroundMismatch : public Error {
 public:
  using Error::Error;
};

/// A combinatorial size guard (enumeration, group closure, brute force) was hit.
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

/// A numerical argument lies outside the domain of the operation, e.g. a
/// concentration matrix that is not positive definite.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or string. `where` locates the problem (line, field).
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what) {}
};

/// The maximum likelihood estimate does not exist for the given data.
class MleNonexistence : public Error {
 public:
  using Error::Error;
};

}  // namespace symlat
