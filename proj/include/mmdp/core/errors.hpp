#pragma once

#include <stdexcept>
#include <string>

namespace mmdp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required input file does not exist or cannot be opened.
class MissingFileError : public Error {
 public:
  using Error::Error;
};

/// Unknown, missing or malformed CSV column.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A probability vector does not sum to one (or has negative entries).
class ProbabilityError : public Error {
 public:
  using Error::Error;
};

/// Negative, non-contiguous or out-of-range identifiers.
class IndexError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The weight table handed to optimize_policy does not fit the instance.
class StaleWeights : public Error {
 public:
  using Error::Error;
};

/// A coordinate-ascent iteration decreased the return. Signals a bug.
class NonMonotone : public Error {
 public:
  using Error::Error;
};

class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// Every model received likelihood zero and no floor was configured.
class DegeneratePosterior : public Error {
 public:
  using Error::Error;
};

/// An exhaustive search was requested over too many candidates.
class Intractable : public Error {
 public:
  using Error::Error;
};

}  // namespace mmdp
