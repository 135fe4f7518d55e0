#pragma once

#include <stdexcept>
#include <string>

namespace hrnr {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition of the operation.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class NotHermitian : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class NotIrreducible : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class NotNonnegative : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class NotConnected : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class NotPerron : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class EmptyRegion : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class ZeroRadius : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class RankTooLarge : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class BadIsometryScaling : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class NonPositiveVector : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

/// An iterative method exhausted its iteration budget.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// Internal consistency failure. Indicates a bug, not bad input.
class PatternViolation : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace hrnr
