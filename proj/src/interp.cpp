#include "kinlab/interp.hpp"

#include <cmath>

#include "kinlab/errors.hpp"

namespace kinlab {

std::vector<double> tridiagonal_solve(const std::vector<double>& a,
                                      const std::vector<double>& b,
                                      const std::vector<double>& c,
                                      const std::vector<double>& d) {
  const std::size_t n = b.size();
  if (a.size() != n || c.size() != n || d.size() != n || n == 0)
    throw ArgumentError("tridiagonal_solve: inconsistent sizes");
  std::vector<double> cp(n), dp(n), x(n);
  cp[0] = c[0] / b[0];
  dp[0] = d[0] / b[0];
  for (std::size_t i = 1; i < n; ++i) {
    double denom = b[i] - a[i] * cp[i - 1];
    cp[i] = c[i] / denom;
    dp[i] = (d[i] - a[i] * dp[i - 1]) / denom;
  }
  x[n - 1] = dp[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
  return x;
}

std::vector<double> cyclic_tridiagonal_solve(const std::vector<double>& a,
                                             const std::vector<double>& b,
                                             const std::vector<double>& c,
                                             double alpha, double beta,
                                             const std::vector<double>& d) {
  const std::size_t n = b.size();
  if (n < 3) throw ArgumentError("cyclic_tridiagonal_solve: n >= 3 required");
  const double gamma = -b[0];
  std::vector<double> bb = b;
  bb[0] = b[0] - gamma;
  bb[n - 1] = b[n - 1] - alpha * beta / gamma;
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = beta;
  std::vector<double> y = tridiagonal_solve(a, bb, c, d);
  std::vector<double> z = tridiagonal_solve(a, bb, c, u);
  double vy = y[0] + (alpha / gamma) * y[n - 1];
  double vz = z[0] + (alpha / gamma) * z[n - 1];
  double factor = vy / (1.0 + vz);
  for (std::size_t i = 0; i < n; ++i) y[i] -= factor * z[i];
  return y;
}

PeriodicSpline::PeriodicSpline(const std::vector<double>& y, double x0, double h)
    : y_(y), x0_(x0), h_(h) {
  const std::size_t n = y.size();
  if (n < 3) throw ArgumentError("PeriodicSpline needs at least 3 nodes");
  if (!(h > 0.0)) throw ArgumentError("PeriodicSpline: h must be positive");
  period_ = h * static_cast<double>(n);
  // Second-derivative system: (h/6) M_{i-1} + (2h/3) M_i + (h/6) M_{i+1}
  //                            = (y_{i+1} - 2 y_i + y_{i-1}) / h, cyclically.
  std::vector<double> a(n, h / 6.0), b(n, 2.0 * h / 3.0), c(n, h / 6.0), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    double ym = y[(i + n - 1) % n], yp = y[(i + 1) % n];
    d[i] = (yp - 2.0 * y[i] + ym) / h;
  }
  m_ = cyclic_tridiagonal_solve(a, b, c, h / 6.0, h / 6.0, d);
}

double PeriodicSpline::eval(double x) const {
  const std::size_t n = y_.size();
  double t = (x - x0_) / h_;
  t -= std::floor(t / static_cast<double>(n)) * static_cast<double>(n);
  if (t >= static_cast<double>(n)) t = 0.0;
  std::size_t i = static_cast<std::size_t>(t);
  if (i >= n) i = n - 1;
  double a = static_cast<double>(i + 1) - t;  // weight of the left node
  double b = 1.0 - a;
  std::size_t ip = (i + 1) % n;
  return a * y_[i] + b * y_[ip] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[ip]) * h_ * h_ / 6.0;
}

ClampedSpline::ClampedSpline(const std::vector<double>& y, double x0, double h)
    : y_(y), x0_(x0), h_(h) {
  const std::size_t n = y.size();
  if (n < 3) throw ArgumentError("ClampedSpline needs at least 3 nodes");
  if (!(h > 0.0)) throw ArgumentError("ClampedSpline: h must be positive");
  // Zero-slope ends: (h/3) M_0 + (h/6) M_1 = (y_1 - y_0)/h, and the mirror
  // condition at the last node.
  std::vector<double> a(n, h / 6.0), b(n, 2.0 * h / 3.0), c(n, h / 6.0), d(n);
  b[0] = h / 3.0;
  b[n - 1] = h / 3.0;
  d[0] = (y[1] - y[0]) / h;
  d[n - 1] = -(y[n - 1] - y[n - 2]) / h;
  for (std::size_t i = 1; i + 1 < n; ++i)
    d[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h;
  m_ = tridiagonal_solve(a, b, c, d);
}

double ClampedSpline::eval(double x) const {
  const std::size_t n = y_.size();
  double t = (x - x0_) / h_;
  if (t < 0.0 || t > static_cast<double>(n - 1)) return 0.0;
  std::size_t i = static_cast<std::size_t>(t);
  if (i >= n - 1) i = n - 2;
  double a = static_cast<double>(i + 1) - t;
  double b = 1.0 - a;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h_ * h_ / 6.0;
}

}  // namespace kinlab
