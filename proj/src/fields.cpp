#include "kinlab/fields.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "kinlab/csvio.hpp"
#include "kinlab/errors.hpp"
#include "kinlab/spectral.hpp"
#include "kinlab/torus.hpp"

namespace kinlab {

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sup_norm(const Eigen::VectorXd& v) {
  return v.cwiseAbs().maxCoeff();
}

}  // namespace

FieldState solve_scaled_poisson(const std::vector<double>& rho, double epsilon) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (rho.size() < 4) throw ArgumentError("rho needs at least 4 cells");
  double defect = mean(rho) - 1.0;
  if (std::abs(defect) > 1e-10)
    throw ChargeImbalanceError(
        "mean density deviates from neutral background by " +
            format_double(defect),
        defect);
  std::vector<double> src(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) src[i] = rho[i] - 1.0;
  FieldState fs;
  fs.epsilon = epsilon;
  fs.u = solve_poisson_zero_mean(src, epsilon * epsilon);
  fs.e = spectral_derivative(fs.u);
  for (double& v : fs.e) v = -v;
  return fs;
}

FieldState solve_poisson_boltzmann(const std::vector<double>& rho,
                                   double epsilon, double tol,
                                   int max_iterations) {
  const int n = static_cast<int>(rho.size());
  if (n < 4) throw ArgumentError("rho needs at least 4 cells");
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (!(tol > 0.0)) throw ArgumentError("tol must be positive");
  double rho_mean = 0.0;
  for (double r : rho) {
    if (r < 0.0) throw ArgumentError("rho must be nonnegative");
    rho_mean += r;
  }
  rho_mean /= n;
  if (!(rho_mean > 0.0)) throw ArgumentError("rho must have positive mean");

  const double eps2 = epsilon * epsilon;
  std::vector<double> d2 = second_derivative_matrix(n);
  Eigen::Map<const Eigen::MatrixXd> D2(d2.data(), n, n);  // symmetric circulant

  // Residual F(U) = eps^2 U'' - exp(U) + rho; we drive sup|F| below tol.
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = std::log(std::max(rho[i], 1e-10));

  auto residual = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    Eigen::VectorXd r = eps2 * (D2 * w);
    for (int i = 0; i < n; ++i) r[i] += rho[i] - std::exp(w[i]);
    return r;
  };

  std::vector<double> history;
  Eigen::VectorXd f = residual(u);
  double fnorm = sup_norm(f);
  history.push_back(fnorm);

  for (int it = 0; it < max_iterations; ++it) {
    if (fnorm <= tol) {
      FieldState fs;
      fs.epsilon = epsilon;
      fs.u.assign(u.data(), u.data() + n);
      fs.e = spectral_derivative(fs.u);
      for (double& v : fs.e) v = -v;
      return fs;
    }
    Eigen::MatrixXd jac = eps2 * D2;
    for (int i = 0; i < n; ++i) jac(i, i) -= std::exp(u[i]);
    Eigen::VectorXd step = jac.partialPivLu().solve(-f);

    // Damping: halve the step until the residual norm decreases.
    double alpha = 1.0;
    Eigen::VectorXd u_next = u + step;
    Eigen::VectorXd f_next = residual(u_next);
    double fnorm_next = sup_norm(f_next);
    int halvings = 0;
    while (fnorm_next >= fnorm && halvings < 40) {
      alpha *= 0.5;
      u_next = u + alpha * step;
      f_next = residual(u_next);
      fnorm_next = sup_norm(f_next);
      ++halvings;
    }
    if (fnorm_next >= fnorm) {
      history.push_back(fnorm_next);
      throw ConvergenceError(
          "Poisson-Boltzmann Newton stalled: residual " +
              format_double(fnorm_next) + " not decreasing",
          history);
    }
    u = u_next;
    f = f_next;
    fnorm = fnorm_next;
    history.push_back(fnorm);
  }
  if (fnorm <= tol) {
    FieldState fs;
    fs.epsilon = epsilon;
    fs.u.assign(u.data(), u.data() + n);
    fs.e = spectral_derivative(fs.u);
    for (double& v : fs.e) v = -v;
    return fs;
  }
  throw ConvergenceError("Poisson-Boltzmann Newton did not reach tolerance " +
                             format_double(tol) + " in " +
                             std::to_string(max_iterations) + " iterations",
                         history);
}

FieldState solve_limit_potential(const std::vector<double>& pi) {
  if (pi.size() < 4) throw ArgumentError("pi needs at least 4 cells");
  double m = mean(pi);
  FieldState fs;
  fs.epsilon = 0.0;
  fs.u.resize(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) fs.u[i] = -(pi[i] - m);
  fs.e = spectral_derivative(fs.u);
  for (double& v : fs.e) v = -v;
  return fs;
}

double debye_length(const PlasmaParameters& p) {
  if (!(p.temperature > 0.0 && p.density > 0.0 && p.permittivity > 0.0 &&
        p.boltzmann > 0.0 && p.charge > 0.0))
    throw ArgumentError("plasma parameters must be strictly positive");
  return std::sqrt(p.permittivity * p.boltzmann * p.temperature /
                   (p.density * p.charge * p.charge));
}

std::vector<double> screening_profile(double defect_amplitude,
                                      double defect_width, double epsilon,
                                      int nx) {
  if (nx < 4) throw ArgumentError("screening_profile needs nx >= 4");
  const double dx = 1.0 / nx;
  if (!(defect_width >= 3.0 * dx))
    throw ArgumentError("defect width narrower than 3 grid cells");
  if (!(epsilon >= 2.0 * dx))
    throw ArgumentError("epsilon unresolvable on this grid (need >= 2 dx)");
  std::vector<double> src(nx);
  for (int i = 0; i < nx; ++i) {
    double d = torus_delta((i + 0.5) * dx, 0.5);
    src[i] = defect_amplitude * std::exp(-0.5 * d * d / (defect_width * defect_width));
  }
  return solve_screened(src, epsilon * epsilon);
}

}  // namespace kinlab
