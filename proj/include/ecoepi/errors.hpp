#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecoepi {

/// Base for every failure of a numerical procedure (as opposed to bad input).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StepSizeUnderflow : public NumericError {
 public:
  using NumericError::NumericError;
};

class NegativityViolation : public NumericError {
 public:
  using NumericError::NumericError;
};

class NoConvergence : public NumericError {
 public:
  explicit NoConvergence(const std::string& what, std::size_t stage = 0)
      : NumericError(what), stage_(stage) {}
  /// Index of the refined-chain stage that failed (0 outside the chain).
  std::size_t stage() const noexcept { return stage_; }

 private:
  std::size_t stage_;
};

class NotPeriodic : public NumericError {
 public:
  using NumericError::NumericError;
};

class NoTemplateMatch : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Query outside the time span covered by a trajectory or sampled series.
class OutOfSpan : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace ecoepi
