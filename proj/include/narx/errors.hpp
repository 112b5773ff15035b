#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace narx {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid meta-parameters or out-of-range arguments.
class ParameterError : public Error {
public:
  using Error::Error;
};

/// Data record too short for the requested lag structure.
class InsufficientDataError : public Error {
public:
  using Error::Error;
};

/// A required auxiliary sequence (e.g. residuals) was not supplied.
class MissingInputError : public Error {
public:
  using Error::Error;
};

/// Regression matrix is numerically rank deficient.
class SingularMatrixError : public Error {
public:
  SingularMatrixError(const std::string& what, std::size_t column)
      : Error(what), column_(column) {}

  /// Index of the first column found to be dependent on its predecessors.
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t column_;
};

/// Dependent or inconsistent equality constraints.
class ConstraintError : public Error {
public:
  using Error::Error;
};

/// The Σy=1 constraint was requested for a term list without linear output terms.
class ConstraintInapplicableError : public Error {
public:
  using Error::Error;
};

/// A sequence has zero range where a nonzero range is required.
class DegenerateRangeError : public Error {
public:
  using Error::Error;
};

/// Malformed file or configuration.
class FormatError : public Error {
public:
  using Error::Error;
};

/// Requested data set is not part of the distribution.
class DataUnavailableError : public Error {
public:
  using Error::Error;
};

}  // namespace narx
