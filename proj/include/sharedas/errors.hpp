#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sharedas {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong shape, non-finite entries, out-of-range index.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Covariance (or metric) matrix is not positive definite.
class SingularCovariance : public Error {
 public:
  using Error::Error;
};

/// A transformed matrix in a determinant ratio is singular.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// The problem evaluator is undefined at the requested point.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Finite-difference stencil hit the domain boundary even after shrinking.
class StencilError : public Error {
 public:
  StencilError(const std::string& what, std::size_t sample_index = kNoIndex)
      : Error(what), sample_index_(sample_index) {}

  static constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);
  std::size_t sample_index() const noexcept { return sample_index_; }

 private:
  std::size_t sample_index_;
};

/// An iterative solver ran out of iterations.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_change)
      : Error(what), last_change_(last_change) {}
  double last_change() const noexcept { return last_change_; }

 private:
  double last_change_;
};

/// Every row of an RMSE evaluation was excluded.
class EmptyEvaluation : public Error {
 public:
  using Error::Error;
};

/// Bad experiment configuration (maps to CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dataset file could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace sharedas
