#pragma once

#include <stdexcept>
#include <string>

namespace tensorpos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: shape mismatches, invalid indices, empty inputs.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A product of dimensions does not fit in the index type.
class SizingError : public Error {
 public:
  using Error::Error;
};

/// Rank-deficient input where a full-rank matrix is required.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// An explicit construction would exceed the caller-supplied size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A quantity that must be real came out with a significant imaginary part.
class NumericalInconsistencyError : public Error {
 public:
  using Error::Error;
};

/// A construction failed its own postcondition. Always an implementation bug.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace tensorpos
