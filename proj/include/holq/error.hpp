#pragma once

#include <stdexcept>
#include <string>

namespace holq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, mode indices or matrix sizes do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A factorization hit a pivot below the rank tolerance.
class RankDeficientError : public Error {
 public:
  using Error::Error;
};

/// Cholesky of a matrix that is not symmetric positive definite.
class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

/// A block coordinate descent run drifted toward a degenerate boundary
/// (factor condition numbers or the scale left their admissible range),
/// which means the minimizer may not exist for this input.
class ExistenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (tensor files, hypothesis strings).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A pair of hypotheses is not structurally nested.
class NestingError : public Error {
 public:
  using Error::Error;
};

}  // namespace holq
