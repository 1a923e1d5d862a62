#pragma once

#include <vector>

namespace kinlab {

// C^2 cubic spline through values y_i at uniform nodes x0 + i*h on a
// periodic domain of period n*h.  Evaluation wraps the argument.
class PeriodicSpline {
 public:
  PeriodicSpline(const std::vector<double>& y, double x0, double h);
  double eval(double x) const;

 private:
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at nodes
  double x0_, h_, period_;
};

// C^2 cubic spline on [x0, x0 + (n-1)h] with zero first derivative clamped
// at both ends; evaluation outside the node range returns 0 (zero inflow).
class ClampedSpline {
 public:
  ClampedSpline(const std::vector<double>& y, double x0, double h);
  double eval(double x) const;

 private:
  std::vector<double> y_;
  std::vector<double> m_;
  double x0_, h_;
};

// Thomas solve of a tridiagonal system; a = sub, b = diag, c = super
// (a[0] and c[n-1] unused).  Overwrites no input; returns the solution.
std::vector<double> tridiagonal_solve(const std::vector<double>& a,
                                      const std::vector<double>& b,
                                      const std::vector<double>& c,
                                      const std::vector<double>& d);

// Solve the cyclic tridiagonal system with constant corner entries
// alpha (top-right) and beta (bottom-left) via Sherman-Morrison.
std::vector<double> cyclic_tridiagonal_solve(const std::vector<double>& a,
                                             const std::vector<double>& b,
                                             const std::vector<double>& c,
                                             double alpha, double beta,
                                             const std::vector<double>& d);

}  // namespace kinlab
