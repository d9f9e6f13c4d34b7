#pragma once

#include <stdexcept>
#include <string>

namespace spectralkl {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NotPositiveSemidefinite : public Error {
 public:
  using Error::Error;
};

class NotDensityMatrix : public Error {
 public:
  using Error::Error;
};

class SingularBase : public Error {
 public:
  using Error::Error;
};

class SigmaNotPD : public Error {
 public:
  using Error::Error;
};

class UnstableA : public Error {
 public:
  using Error::Error;
};

class NotReachable : public Error {
 public:
  using Error::Error;
};

/// A has no eigenvalue at the origin and the caller did not waive the check.
class KlModeViolation : public Error {
 public:
  using Error::Error;
};

class GridTooCoarse : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// The quadratic form G*(z) Lambda G(z) is not positive on the whole circle.
class SpectrumNotPositive : public Error {
 public:
  using Error::Error;
};

class NoStabilizingSolution : public Error {
 public:
  using Error::Error;
};

class LyapunovSolveFailure : public Error {
 public:
  using Error::Error;
};

class InfeasibleProblem : public Error {
 public:
  using Error::Error;
};

class NotAFixedPoint : public Error {
 public:
  using Error::Error;
};

class EvaluationSingular : public Error {
 public:
  using Error::Error;
};

class NonPositiveSpectrum : public Error {
 public:
  using Error::Error;
};

class InvalidPrior : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace spectralkl
