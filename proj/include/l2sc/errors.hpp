#pragma once

#include <stdexcept>
#include <string>

namespace l2sc {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition (bad shape, NaN/Inf input,
// out-of-range hyperparameter, ...).
struct InvalidInput : Error {
  using Error::Error;
};

// Matrix handed to an orthogonality-preserving factorization is numerically
// rank deficient (smallest singular value below threshold).
struct RankDeficient : Error {
  using Error::Error;
};

// A data-derived scale collapsed to zero, e.g. the median neighbor distance
// of a duplicate-only dataset.
struct DegenerateScale : Error {
  using Error::Error;
};

// An iterative routine could not recover after its documented retry.
struct NumericalFailure : Error {
  using Error::Error;
};

// A file exists but its contents do not parse as the expected format.
struct FormatError : Error {
  using Error::Error;
};

// A library snapshot was written by an incompatible format version.
struct VersionError : Error {
  using Error::Error;
};

// The OS would not let us read or write a path.
struct IoError : Error {
  using Error::Error;
};

}  // namespace l2sc
