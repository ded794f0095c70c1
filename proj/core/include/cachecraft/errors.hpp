#pragma once

#include <stdexcept>
#include <string>

namespace cachecraft {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An instance violates one or more of its invariants (N < K, m_k out of range, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A caller passed arguments that do not fit the operation (j not in T, missing variable, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A closed form was called outside the regime where it holds.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The request would blow past a hard size cap (K!, 2^K, packet counts).
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

/// A consistency check that cannot fail for valid inputs did fail.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace cachecraft
