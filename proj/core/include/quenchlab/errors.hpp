#pragma once

#include <stdexcept>
#include <string>

namespace quenchlab {

// Linear solver failed to reach its residual tolerance.
class SolverBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative eigen or fixed-point method hit its iteration cap.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A field value reached or passed the blow-up level 1, or went negative,
// where a pointwise nonlinearity evaluation was required.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A field or grid did not match the grid it was used with.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation was called outside its documented precondition.
class PreconditionViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inverse iteration on the linearized operator did not produce a positive
// limit with positive eigenvalue. Carries the eigenvalue of smallest real
// part, computed by a shifted iteration, when it could be obtained.
class IndefiniteOperator : public std::runtime_error {
 public:
  IndefiniteOperator(const std::string& what, double nu_estimate)
      : std::runtime_error(what), nu_estimate_(nu_estimate) {}
  double nu_estimate() const noexcept { return nu_estimate_; }

 private:
  double nu_estimate_;
};

// A trajectory never decayed far enough to fit a tail rate.
class InsufficientDecay : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace quenchlab
