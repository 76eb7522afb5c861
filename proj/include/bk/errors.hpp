#pragma once

#include <stdexcept>
#include <string>

namespace bk {

//! Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Parameter or argument outside its admissible domain.
class DomainError : public Error {
public:
  using Error::Error;
};

//! Operation not defined for the given model kind.
class UnsupportedOperation : public Error {
public:
  using Error::Error;
};

//! Data summary does not match the model kind, or violates its support.
class DataMismatch : public Error {
public:
  using Error::Error;
};

//! Every candidate has zero evidence (all log weights are -inf).
class DegenerateEvidence : public Error {
public:
  using Error::Error;
};

//! Requested moment does not exist.
class MomentUndefined : public Error {
public:
  using Error::Error;
};

//! Iterative numerics (root finding, quadrature, Newton) failed.
class NumericError : public Error {
public:
  using Error::Error;
};

//! Posterior mass leaks onto the edge of a user-supplied grid.
class GridCoverageError : public Error {
public:
  using Error::Error;
};

//! Laplace integral requested where the maximum sits on the domain boundary.
class BoundaryMaximum : public Error {
public:
  using Error::Error;
};

//! Two densities do not share enough common support for comparison.
class SupportMismatch : public Error {
public:
  using Error::Error;
};

//! Normalizing constant requested for a prior that is not certified proper.
class ImproperPrior : public Error {
public:
  using Error::Error;
};

} // namespace bk
