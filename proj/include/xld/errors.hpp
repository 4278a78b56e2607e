#pragma once

#include <stdexcept>
#include <string>

namespace xld {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing file, bad magic bytes, truncated or unwritable stream.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed header or record in a dataset or model file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Shapes that should agree do not (row lengths, matrix sizes).
class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// Label outside 1..C, or a class with no samples.
class UnknownLabelError : public Error {
 public:
  using Error::Error;
};

/// NaN or infinity where a finite value is required.
class NonFiniteValueError : public Error {
 public:
  using Error::Error;
};

/// A sample (or residual) with zero norm where a direction is needed.
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its documented range (layout counts, fold counts, ...).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// A positive-definite solve failed; signals corrupt (non-finite) input.
class SolveError : public Error {
 public:
  using Error::Error;
};

/// Every class score is undefined for this query.
class UnclassifiableError : public Error {
 public:
  using Error::Error;
};

}  // namespace xld
