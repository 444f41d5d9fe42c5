#pragma once

#include <stdexcept>
#include <string>

namespace eiginf {

// Root of every error thrown by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed external input (matrix files, configs, edge lists).
class InputError : public Error {
 public:
  using Error::Error;
};

// Some eigenvalue has geometric multiplicity below its algebraic multiplicity.
class DefectiveMatrixError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Selected and unselected roots are closer than the configured gap.
class SpectralGapError : public Error {
 public:
  using Error::Error;
};

// A root selection contains one member of a complex-conjugate pair but not the other.
class ConjugationError : public Error {
 public:
  using Error::Error;
};

class RankError : public Error {
 public:
  using Error::Error;
};

class SingularOperatorError : public Error {
 public:
  using Error::Error;
};

// The bottom k x k block of R_I is (numerically) singular, so the
// [D; I_k] parameterization does not exist.
class SingularNormalizationError : public Error {
 public:
  SingularNormalizationError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class NonpositiveVarianceError : public Error {
 public:
  using Error::Error;
};

class DominantRootTieError : public Error {
 public:
  using Error::Error;
};

}  // namespace eiginf
