#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kinlab {

// Invalid argument values (shape mismatches, out-of-range parameters, bad
// configuration).  Callers that pass validated data never see this.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative solver failed to reach its tolerance.  Carries the residual
// history so the caller can inspect how the iteration behaved.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residual_history(std::move(residuals)) {}
  std::vector<double> residual_history;
};

// The source of a periodic Poisson problem is not neutral (mean density
// deviates from the background), so no solution exists.
class ChargeImbalanceError : public std::runtime_error {
 public:
  ChargeImbalanceError(const std::string& what, double defect_)
      : std::runtime_error(what), defect(defect_) {}
  double defect;
};

// A problem instance exceeds a documented size cap.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A velocity-domain truncation budget was exceeded (too much mass reached
// the grid boundary, or too much negative undershoot had to be clipped).
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A time step violates the stability limit of an explicit scheme.
class CflError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Particle data incompatible with a requested operation (e.g. velocities
// outside the deposit grid).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kinlab
