#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "kinlab/errors.hpp"
#include "kinlab/fields.hpp"
#include "kinlab/spectral.hpp"

using namespace kinlab;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<double> cosine_density(int n, double amp, int mode) {
  std::vector<double> rho(n);
  for (int i = 0; i < n; ++i)
    rho[i] = 1.0 + amp * std::cos(kTwoPi * mode * (i + 0.5) / n);
  return rho;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
}  // namespace

TEST_CASE("scaled electrostatic solve matches the single-mode solution") {
  // For rho = 1 + a cos(2 pi k x), the zero-mean potential solving
  // -eps^2 U'' = rho - 1 is U = a cos(2 pi k x) / (eps (2 pi k))^2 and the
  // field E = -U' = a sin(2 pi k x) / (eps^2 (2 pi k)).
  const int n = 128;
  for (double eps : {1.0, 0.1, 0.02}) {
    for (int k : {1, 3, 10}) {
      const double a = 0.4;
      FieldState fs = solve_scaled_poisson(cosine_density(n, a, k), eps);
      CHECK(fs.epsilon == eps);
      const double cu = a / (eps * eps * kTwoPi * kTwoPi * k * k);
      const double ce = a / (eps * eps * kTwoPi * k);
      for (int i = 0; i < n; i += 11) {
        const double x = (i + 0.5) / n;
        CHECK(fs.u[i] == doctest::Approx(cu * std::cos(kTwoPi * k * x))
                             .epsilon(1e-12)
                             .scale(cu));
        CHECK(fs.e[i] == doctest::Approx(ce * std::sin(kTwoPi * k * x))
                             .epsilon(1e-12)
                             .scale(ce));
      }
      double mean = 0.0;
      for (double v : fs.u) mean += v;
      CHECK(std::abs(mean / n) < 1e-13 * cu);
    }
  }
}

TEST_CASE("electrostatic solve rejects net charge") {
  auto rho = cosine_density(64, 0.2, 1);
  for (double& v : rho) v += 1e-6;
  CHECK_THROWS_AS(solve_scaled_poisson(rho, 0.1), ChargeImbalanceError);
  CHECK_THROWS_AS(solve_scaled_poisson(cosine_density(64, 0.2, 1), 0.0),
                  ArgumentError);
  CHECK_THROWS_AS(solve_scaled_poisson(cosine_density(64, 0.2, 1), -1.0),
                  ArgumentError);
}

TEST_CASE("limit potential is the centered second moment field") {
  const int n = 96;
  std::vector<double> pi(n);
  for (int i = 0; i < n; ++i)
    pi[i] = 2.0 + 0.7 * std::sin(kTwoPi * (i + 0.5) / n) +
            0.1 * std::cos(2 * kTwoPi * (i + 0.5) / n);
  FieldState fs = solve_limit_potential(pi);
  double mean = 0.0;
  for (double v : pi) mean += v;
  mean /= n;
  for (int i = 0; i < n; ++i)
    CHECK(fs.u[i] == doctest::Approx(-(pi[i] - mean)).epsilon(1e-12));
  // E = -U' = (pi - mean)': spot check against the spectral derivative.
  auto dpi = spectral_derivative(pi);
  for (int i = 0; i < n; i += 17)
    CHECK(fs.e[i] == doctest::Approx(dpi[i]).epsilon(1e-10));
}

TEST_CASE("nonlinear electron solve: constant density gives log potential") {
  const int n = 32;
  for (double c : {0.5, 1.0, 2.3}) {
    std::vector<double> rho(n, c);
    FieldState fs = solve_poisson_boltzmann(rho, 0.1);
    for (double u : fs.u) CHECK(u == doctest::Approx(std::log(c)).epsilon(1e-12));
    for (double e : fs.e) CHECK(std::abs(e) < 1e-10);
  }
}

TEST_CASE("nonlinear electron solve: small-amplitude linearization") {
  // Linearizing e^U - rho about U = 0 for rho = 1 + a cos(2 pi x) gives
  // U_lin = a cos(2 pi x) / (1 + eps^2 (2 pi)^2); the quadratic remainder
  // is bounded by a few a^2.
  const int n = 128;
  for (double eps : {1.0, 0.3, 0.05}) {
    for (double a : {0.01, 0.05}) {
      FieldState fs = solve_poisson_boltzmann(cosine_density(n, a, 1), eps);
      std::vector<double> lin(n);
      for (int i = 0; i < n; ++i)
        lin[i] = a * std::cos(kTwoPi * (i + 0.5) / n) /
                 (1.0 + eps * eps * kTwoPi * kTwoPi);
      CHECK(sup_diff(fs.u, lin) < 5.0 * a * a);
    }
  }
}

TEST_CASE("nonlinear electron solve: residual is tiny and iterations bounded") {
  const int n = 64;
  for (double eps : {1.0, 0.1}) {
    for (double a : {0.1, 0.3, 0.5}) {
      auto rho = cosine_density(n, a, 2);
      // Convergence within a dozen damped Newton steps.
      FieldState fs = solve_poisson_boltzmann(rho, eps, 1e-10, 12);
      auto upp = spectral_second_derivative(fs.u);
      for (int i = 0; i < n; ++i) {
        const double res = eps * eps * upp[i] - (std::exp(fs.u[i]) - rho[i]);
        CHECK(std::abs(res) < 1e-9);
      }
      // E = -U'.
      auto du = spectral_derivative(fs.u);
      for (int i = 0; i < n; i += 7)
        CHECK(fs.e[i] == doctest::Approx(-du[i]).epsilon(1e-8).scale(1.0));
    }
  }
  CHECK_THROWS_AS(
      solve_poisson_boltzmann(cosine_density(n, 0.5, 1), 0.1, 1e-10, 1),
      ConvergenceError);
  CHECK_THROWS_AS(solve_poisson_boltzmann(std::vector<double>(n, -1.0), 0.1),
                  ArgumentError);
}

TEST_CASE("nonlinear electron solve preserves ordering of smooth data") {
  // Comparison property: a strictly larger smooth source yields a larger
  // potential (checked with slack on top of the discrete solve).
  const int n = 64;
  auto lo = cosine_density(n, 0.2, 1);
  auto hi = lo;
  for (double& v : hi) v += 0.5;
  FieldState a = solve_poisson_boltzmann(lo, 0.2);
  FieldState b = solve_poisson_boltzmann(hi, 0.2);
  for (int i = 0; i < n; ++i) CHECK(b.u[i] > a.u[i] - 1e-9);
}

TEST_CASE("screening profile decays at the expected exponential rate") {
  const int nx = 512;
  const double eps = 0.05;
  const double width = 5.0 / nx;
  std::vector<double> u = screening_profile(1.0, width, eps, nx);
  // Response to a localized positive defect centered at x = 1/2: positive
  // peak there, even about the center (cell i mirrors to nx-1-i), decaying
  // like exp(-d/eps) away from it.
  const int peak =
      static_cast<int>(std::max_element(u.begin(), u.end()) - u.begin());
  CHECK(u[peak] > 0.0);
  CHECK(std::abs((peak + 0.5) / nx - 0.5) <= 1.5 / nx);
  for (int i = nx / 2; i < nx / 2 + 40; ++i)
    CHECK(u[i] == doctest::Approx(u[nx - 1 - i]).epsilon(1e-8).scale(u[peak]));
  // Log-slope between d = 4 eps and d = 6 eps approximates -1/eps.
  const int i1 = nx / 2 + static_cast<int>(std::round(4.0 * eps * nx));
  const int i2 = nx / 2 + static_cast<int>(std::round(6.0 * eps * nx));
  const double d1 = (i1 + 0.5) / nx - 0.5;
  const double d2 = (i2 + 0.5) / nx - 0.5;
  const double rate = -std::log(u[i2 % nx] / u[i1 % nx]) / (d2 - d1);
  CHECK(rate * eps == doctest::Approx(1.0).epsilon(0.05));

  CHECK_THROWS_AS(screening_profile(1.0, 0.5 / nx, eps, nx), ArgumentError);
  CHECK_THROWS_AS(screening_profile(1.0, width, 0.5 / nx, nx), ArgumentError);
}

TEST_CASE("debye length in reduced and physical units") {
  PlasmaParameters unit;  // all parameters one
  CHECK(debye_length(unit) == doctest::Approx(1.0).epsilon(1e-15));

  // Laboratory plasma: T_e = 1 eV expressed with k_B = 1 (temperature in
  // joules folded into the product k_B T_e), n_e = 1e18 m^-3, SI constants.
  PlasmaParameters lab;
  lab.temperature = 1.602176634e-19;  // k_B T_e in joules
  lab.boltzmann = 1.0;
  lab.density = 1e18;
  lab.permittivity = 8.8541878128e-12;
  lab.charge = 1.602176634e-19;
  // Frozen from lambda_D = sqrt(eps0 kT / (n e^2)) evaluated independently.
  CHECK(debye_length(lab) == doctest::Approx(7.4339e-6).epsilon(1e-3));

  PlasmaParameters bad = unit;
  bad.density = 0.0;
  CHECK_THROWS_AS(debye_length(bad), ArgumentError);
}
