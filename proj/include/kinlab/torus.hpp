#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "kinlab/errors.hpp"

namespace kinlab {

// Wrap a real number into the fundamental domain [0, 1).
inline double wrap_unit(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y = 0.0;  // guards the rounding case x = -1e-17 -> y = 1.0
  return y;
}

// Signed representative of (a - b) mod 1 in [-1/2, 1/2].
inline double torus_delta(double a, double b) {
  double d = a - b;
  return d - std::round(d);
}

// A point on the flat torus T^d = (R/Z)^d with d <= 3.  Coordinates are
// stored wrapped into [0,1).
struct TorusPoint {
  int dim = 1;
  std::array<double, 3> c{0.0, 0.0, 0.0};

  TorusPoint() = default;

  explicit TorusPoint(double x) : dim(1) { c[0] = wrap_unit(x); }

  TorusPoint(int d, const std::array<double, 3>& raw) : dim(d) {
    if (d < 1 || d > 3) throw ArgumentError("torus dimension must be 1..3");
    for (int k = 0; k < d; ++k) c[k] = wrap_unit(raw[k]);
  }

  double operator[](int k) const { return c[k]; }
};

// Geodesic (minimal-shift Euclidean) distance on T^d.
inline double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  if (a.dim != b.dim) throw ArgumentError("torus points of different dimension");
  double s = 0.0;
  for (int k = 0; k < a.dim; ++k) {
    double d = torus_delta(a.c[k], b.c[k]);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace kinlab
