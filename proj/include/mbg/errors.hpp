#pragma once

#include <stdexcept>
#include <string>

namespace mbg {

// Error taxonomy shared across the library. Everything derives from
// mbg::Error so callers can catch the whole family at once.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Point on or outside the boundary where a barrier is undefined.
class BoundaryError : public Error {
public:
  using Error::Error;
};

// Matrix to be inverted has an eigenvalue below the numerical floor.
class SingularityError : public Error {
public:
  using Error::Error;
};

// Iterative solver exhausted its iteration budget.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

// Query point lies outside the feasible set.
class DomainError : public Error {
public:
  using Error::Error;
};

// A played action violates its action-set constraints.
class FeasibilityError : public Error {
public:
  using Error::Error;
};

// Invalid construction parameters.
class ParamError : public Error {
public:
  using Error::Error;
};

// Malformed input data; message carries the line number.
class ParseError : public Error {
public:
  using Error::Error;
};

// Feature index exceeds the configured dimension.
class DimensionError : public Error {
public:
  using Error::Error;
};

// Aggregation requested over a grid with no data.
class MissingCellError : public Error {
public:
  using Error::Error;
};

// Not enough checkpoints to fit a rate.
class InsufficientDataError : public Error {
public:
  using Error::Error;
};

}  // namespace mbg
