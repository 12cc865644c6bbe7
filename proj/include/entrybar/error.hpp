#pragma once

#include <stdexcept>
#include <string>

namespace entrybar {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violates an operation's precondition (domain, range, regime,
/// model hypothesis).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative method exhausted its budget before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A solved object failed its own consistency check. Indicates a bug or an
/// input outside the model's assumptions that slipped past validation.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace entrybar
