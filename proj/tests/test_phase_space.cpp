#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "kinlab/errors.hpp"
#include "kinlab/interp.hpp"
#include "kinlab/phase_space.hpp"
#include "kinlab/rng.hpp"
#include "kinlab/spectral.hpp"
#include "kinlab/torus.hpp"

using namespace kinlab;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

GriddedDistribution test_distribution(int nx, int nv, double v_max,
                                      double amp) {
  PhaseGrid g(nx, nv, v_max);
  GriddedDistribution f(g);
  const double sigma = 0.35 * v_max;
  for (int i = 0; i < nx; ++i) {
    const double rho = 1.0 + amp * std::cos(kTwoPi * g.x_center(i));
    for (int j = 0; j < nv; ++j) {
      const double z = g.v_center(j) / sigma;
      f.at(i, j) = rho * std::exp(-0.5 * z * z);
    }
  }
  const double m = f.mass();
  for (double& v : f.values) v /= m;
  return f;
}
}  // namespace

TEST_CASE("torus wrap and minimal signed distance") {
  CHECK(wrap_unit(1.25) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(wrap_unit(-0.25) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(torus_delta(0.9, 0.1) == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(torus_delta(0.1, 0.9) == doctest::Approx(0.2).epsilon(1e-12));
  // Antipodal points: distance is exactly one half.
  CHECK(std::abs(torus_delta(0.25, 0.75)) == doctest::Approx(0.5));
  TorusPoint p(1.75);
  CHECK(p[0] == doctest::Approx(0.75));
}

TEST_CASE("grid geometry and uniform mass") {
  PhaseGrid g(16, 8, 2.0);
  CHECK(g.dx() == doctest::Approx(1.0 / 16));
  CHECK(g.dv() == doctest::Approx(0.5));
  CHECK(g.x_center(0) == doctest::Approx(1.0 / 32));
  CHECK(g.v_center(0) == doctest::Approx(-1.75));
  CHECK(g.v_center(7) == doctest::Approx(1.75));

  GriddedDistribution f(g);
  // f = 1/(4 v_max) integrates to one over [0,1] x [-v_max, v_max].
  for (double& v : f.values) v = 1.0 / (2.0 * g.v_max);
  CHECK(f.mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(PhaseGrid(3, 8, 1.0), ArgumentError);
  CHECK_THROWS_AS(PhaseGrid(8, 8, -1.0), ArgumentError);
}

TEST_CASE("moments of a separable distribution match direct sums") {
  GriddedDistribution f = test_distribution(32, 64, 1.5, 0.4);
  MomentFields m = moments(f);
  const PhaseGrid& g = f.grid;
  REQUIRE(m.rho.size() == 32);
  for (int i = 0; i < g.nx; i += 7) {
    double rho = 0.0, cur = 0.0, pi = 0.0;
    for (int j = 0; j < g.nv; ++j) {
      rho += f.at(i, j) * g.dv();
      cur += g.v_center(j) * f.at(i, j) * g.dv();
      pi += g.v_center(j) * g.v_center(j) * f.at(i, j) * g.dv();
    }
    CHECK(m.rho[i] == doctest::Approx(rho).epsilon(1e-14));
    CHECK(m.j[i] == doctest::Approx(cur).epsilon(1e-14));
    CHECK(m.pi[i] == doctest::Approx(pi).epsilon(1e-14));
  }
  // Even velocity profile: current vanishes identically.
  for (double j : m.j) CHECK(std::abs(j) < 1e-15);
}

TEST_CASE("monokinetic lift reproduces rho and j exactly") {
  PhaseGrid g(24, 48, 1.0);
  std::vector<double> rho(24), u(24);
  for (int i = 0; i < 24; ++i) {
    rho[i] = 1.0 + 0.3 * std::sin(kTwoPi * g.x_center(i));
    u[i] = 0.2 * std::cos(kTwoPi * g.x_center(i));
  }
  GriddedDistribution f = monokinetic_lift(rho, u, g);
  MomentFields m = moments(f);
  for (int i = 0; i < 24; ++i) {
    CHECK(m.rho[i] == doctest::Approx(rho[i]).epsilon(1e-13));
    CHECK(m.j[i] == doctest::Approx(rho[i] * u[i]).epsilon(1e-12));
    // Smearing of the second moment is below dv^2/4 per unit density.
    const double dv2 = g.dv() * g.dv();
    CHECK(std::abs(m.pi[i] - rho[i] * u[i] * u[i]) <= 0.25 * dv2 * rho[i] + 1e-15);
  }
  // Velocities outside the representable band are rejected.
  u[3] = 1.0;
  CHECK_THROWS_AS(monokinetic_lift(rho, u, g), DomainError);
}

TEST_CASE("seeded sampling is reproducible and statistically consistent") {
  GriddedDistribution f = test_distribution(64, 64, 1.5, 0.5);
  ParticleEnsemble a = sample_particles(f, 20000, 99);
  ParticleEnsemble b = sample_particles(f, 20000, 99);
  REQUIRE(a.size() == 20000);
  a.validate();
  for (std::size_t s = 0; s < a.size(); s += 997) {
    CHECK(a.x[s][0] == b.x[s][0]);
    CHECK(a.v[s][0] == b.v[s][0]);
  }
  CHECK(a.w[0] == doctest::Approx(1.0 / 20000).epsilon(1e-15));

  // Empirical first moment of cos(2 pi x) has expectation amp/2 = 0.25;
  // the Monte Carlo error at n = 2e4 is about 0.005.
  double cmean = 0.0, vmean = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    cmean += std::cos(kTwoPi * a.x[s][0]);
    vmean += a.v[s][0];
  }
  cmean /= static_cast<double>(a.size());
  vmean /= static_cast<double>(a.size());
  CHECK(std::abs(cmean - 0.25) < 0.02);
  CHECK(std::abs(vmean) < 0.02);

  ParticleEnsemble c = sample_particles(f, 20000, 100);
  CHECK(c.x[0][0] != a.x[0][0]);
}

TEST_CASE("deposit conserves mass and inverts sampling on average") {
  GriddedDistribution f = test_distribution(32, 32, 1.5, 0.5);
  ParticleEnsemble p = sample_particles(f, 50000, 7);
  GriddedDistribution back = deposit(p, f.grid);
  CHECK(back.mass() == doctest::Approx(1.0).epsilon(1e-12));
  back.check_nonnegative();
  MomentFields m0 = moments(f), m1 = moments(back);
  double worst = 0.0;
  for (int i = 0; i < 32; ++i) worst = std::max(worst, std::abs(m0.rho[i] - m1.rho[i]));
  CHECK(worst < 0.08);  // Monte Carlo + CIC smoothing at n = 5e4

  p.v[5][0] = 2.0;  // outside the velocity band
  CHECK_THROWS_AS(deposit(p, f.grid), DomainError);
}

TEST_CASE("ensemble invariants are enforced") {
  ParticleEnsemble p;
  p.dim = 1;
  p.x = {TorusPoint(0.1), TorusPoint(0.5)};
  p.v = {std::array<double, 3>{0.0, 0.0, 0.0},
         std::array<double, 3>{1.0, 0.0, 0.0}};
  p.w = {0.5, 0.4};
  CHECK_THROWS_AS(p.validate(), ArgumentError);  // weights sum to 0.9
  p.w = {1.1, -0.1};
  CHECK_THROWS_AS(p.validate(), ArgumentError);  // nonpositive weight
  p.w = {0.5, 0.5};
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("distribution and ensemble serialization round-trips exactly") {
  GriddedDistribution f = test_distribution(16, 8, 1.25, 0.3);
  std::ostringstream out;
  write_distribution(out, f);
  std::istringstream in(out.str());
  GriddedDistribution g = read_distribution(in);
  CHECK(g.grid == f.grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(g.values[i] == f.values[i]);

  ParticleEnsemble p = sample_particles(f, 37, 3);
  std::ostringstream pout;
  write_ensemble(pout, p);
  std::istringstream pin(pout.str());
  ParticleEnsemble q = read_ensemble(pin);
  REQUIRE(q.size() == p.size());
  CHECK(q.dim == p.dim);
  for (std::size_t s = 0; s < p.size(); ++s) {
    CHECK(q.x[s][0] == p.x[s][0]);
    CHECK(q.v[s][0] == p.v[s][0]);
    CHECK(q.w[s] == p.w[s]);
  }

  std::istringstream bad("16 8\n1 2 3\n");
  CHECK_THROWS_AS(read_distribution(bad), ArgumentError);
  std::istringstream neg("2 2 1\n1 1\n1 -0.5\n");
  CHECK_THROWS_AS(read_distribution(neg), ArgumentError);
}

TEST_CASE("boundary mass fraction flags edge-layer concentration") {
  PhaseGrid g(8, 16, 1.0);
  GriddedDistribution f(g);
  for (int i = 0; i < 8; ++i) f.at(i, 0) = 1.0;  // everything at the bottom edge
  CHECK(f.boundary_mass_fraction() == doctest::Approx(1.0));
  GriddedDistribution h = test_distribution(8, 64, 2.0, 0.0);
  CHECK(h.boundary_mass_fraction() < 0.01);
}

// ---------------------------------------------------------------------------
// Spectral layer.

TEST_CASE("dft matches the defining sum and inverts") {
  Rng rng(5);
  for (int n : {8, 12, 16, 27}) {
    std::vector<double> f(n);
    for (double& v : f) v = rng.uniform(-1.0, 1.0);
    auto spec = dft(f);
    // Direct evaluation at a few bins.
    for (int k : {0, 1, n / 2}) {
      std::complex<double> acc(0.0, 0.0);
      for (int j = 0; j < n; ++j) {
        const double ph = -kTwoPi * j * k / n;
        acc += f[j] * std::complex<double>(std::cos(ph), std::sin(ph));
      }
      CHECK(std::abs(spec[k] - acc) < 1e-10);
    }
    auto back = idft_real(spec);
    for (int j = 0; j < n; ++j) CHECK(back[j] == doctest::Approx(f[j]).epsilon(1e-12));
  }
}

TEST_CASE("spectral derivatives are exact on resolved modes") {
  const int n = 32;
  std::vector<double> f(n), d1(n), d2(n);
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    f[i] = std::sin(kTwoPi * 3 * x);
    d1[i] = kTwoPi * 3 * std::cos(kTwoPi * 3 * x);
    d2[i] = -kTwoPi * kTwoPi * 9 * std::sin(kTwoPi * 3 * x);
  }
  auto g1 = spectral_derivative(f);
  auto g2 = spectral_second_derivative(f);
  for (int i = 0; i < n; ++i) {
    CHECK(g1[i] == doctest::Approx(d1[i]).epsilon(1e-10));
    CHECK(g2[i] == doctest::Approx(d2[i]).epsilon(1e-10));
  }
}

TEST_CASE("screened solve inverts its operator") {
  const int n = 64;
  const double coef = 0.01;
  Rng rng(11);
  std::vector<double> src(n);
  for (double& v : src) v = rng.uniform(0.0, 1.0);
  auto u = solve_screened(src, coef);
  auto upp = spectral_second_derivative(u);
  for (int i = 0; i < n; ++i)
    CHECK(u[i] - coef * upp[i] == doctest::Approx(src[i]).epsilon(1e-10));
}

TEST_CASE("dense second-derivative matrix matches the spectral operator") {
  const int n = 16;
  auto mat = second_derivative_matrix(n);
  Rng rng(2);
  std::vector<double> f(n);
  for (double& v : f) v = rng.uniform(-1.0, 1.0);
  auto ref = spectral_second_derivative(f);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += mat[i * n + j] * f[j];
    CHECK(acc == doctest::Approx(ref[i]).epsilon(1e-9));
  }
}

// ---------------------------------------------------------------------------
// Interpolation layer.

TEST_CASE("periodic spline interpolates nodes and reproduces smooth shifts") {
  const int n = 64;
  const double h = 1.0 / n;
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = std::sin(kTwoPi * ((i + 0.5) * h));
  PeriodicSpline sp(y, 0.5 * h, h);
  for (int i = 0; i < n; ++i) CHECK(sp.eval((i + 0.5) * h) == doctest::Approx(y[i]).epsilon(1e-12));
  // Quarter-cell offsets of a single mode: quartic accuracy.
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.75) * h;
    worst = std::max(worst, std::abs(sp.eval(x) - std::sin(kTwoPi * x)));
  }
  CHECK(worst < 5e-6);
  // Periodicity of evaluation.
  CHECK(sp.eval(0.3) == doctest::Approx(sp.eval(1.3)).epsilon(1e-13));
}

TEST_CASE("clamped spline is flat at the ends and zero outside") {
  const int n = 33;
  const double h = 0.05, x0 = -0.8;
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    const double v = x0 + i * h;
    y[i] = std::exp(-8.0 * v * v);
  }
  ClampedSpline sp(y, x0, h);
  for (int i = 0; i < n; ++i) CHECK(sp.eval(x0 + i * h) == doctest::Approx(y[i]).epsilon(1e-12));
  CHECK(sp.eval(x0 - 0.01) == 0.0);
  CHECK(sp.eval(x0 + (n - 1) * h + 0.01) == 0.0);
  // Zero-slope clamp: symmetric finite difference at the left end is tiny.
  const double d = (sp.eval(x0 + 1e-6) - sp.eval(x0)) / 1e-6;
  CHECK(std::abs(d) < 1e-4);
}

TEST_CASE("tridiagonal solvers match dense elimination") {
  const int n = 12;
  Rng rng(17);
  std::vector<double> a(n), b(n), c(n), d(n);
  for (int i = 0; i < n; ++i) {
    a[i] = rng.uniform(-0.3, 0.3);
    c[i] = rng.uniform(-0.3, 0.3);
    b[i] = 2.0 + rng.uniform(0.0, 1.0);  // diagonally dominant
    d[i] = rng.uniform(-1.0, 1.0);
  }
  auto x = tridiagonal_solve(a, b, c, d);
  for (int i = 0; i < n; ++i) {
    double lhs = b[i] * x[i];
    if (i > 0) lhs += a[i] * x[i - 1];
    if (i + 1 < n) lhs += c[i] * x[i + 1];
    CHECK(lhs == doctest::Approx(d[i]).epsilon(1e-11));
  }
  const double alpha = 0.2, beta = -0.15;
  auto xc = cyclic_tridiagonal_solve(a, b, c, alpha, beta, d);
  for (int i = 0; i < n; ++i) {
    double lhs = b[i] * xc[i];
    lhs += a[i] * xc[(i + n - 1) % n] * (i > 0 ? 1.0 : 0.0);
    lhs += c[i] * xc[(i + 1) % n] * (i + 1 < n ? 1.0 : 0.0);
    if (i == 0) lhs += alpha * xc[n - 1];
    if (i == n - 1) lhs += beta * xc[0];
    CHECK(lhs == doctest::Approx(d[i]).epsilon(1e-11));
  }
}

TEST_CASE("rng streams are deterministic and well scaled") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  Rng c(124);
  double mean = 0.0, var = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double z = c.normal();
    mean += z;
    var += z * z;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
  Rng d(125);
  for (int i = 0; i < 1000; ++i) {
    const double u = d.uniform(2.0, 3.0);
    CHECK(u >= 2.0);
    CHECK(u < 3.0);
  }
}
