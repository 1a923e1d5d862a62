#include "kinlab/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "kinlab/csvio.hpp"
#include "kinlab/errors.hpp"
#include "kinlab/spectral.hpp"
#include "kinlab/torus.hpp"

namespace kinlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Clip negative interpolation undershoots to zero; returns the clipped mass.
double clip_negatives(GriddedDistribution& f) {
  double clipped = 0.0;
  for (double& v : f.values) {
    if (v < 0.0) {
      clipped -= v;
      v = 0.0;
    }
  }
  return clipped * f.grid.dx() * f.grid.dv();
}

// Shift every x-row of f by v_j * tau (periodic cubic spline resampling).
void advect_x(GriddedDistribution& f, double tau) {
  const PhaseGrid& g = f.grid;
  const double dx = g.dx();
  std::vector<double> row(g.nx), shifted(g.nx);
  for (int j = 0; j < g.nv; ++j) {
    const double delta = g.v_center(j) * tau;
    if (delta == 0.0) continue;
    for (int i = 0; i < g.nx; ++i) row[i] = f.at(i, j);
    PeriodicSpline sp(row, 0.5 * dx, dx);
    for (int i = 0; i < g.nx; ++i) shifted[i] = sp.eval(g.x_center(i) - delta);
    for (int i = 0; i < g.nx; ++i) f.at(i, j) = shifted[i];
  }
}

// Shift every v-column of f by e[i] * dt (clamped cubic, zero inflow).
void advect_v(GriddedDistribution& f, const std::vector<double>& e, double dt) {
  const PhaseGrid& g = f.grid;
  const double dv = g.dv();
  std::vector<double> col(g.nv), shifted(g.nv);
  for (int i = 0; i < g.nx; ++i) {
    const double delta = e[i] * dt;
    if (delta == 0.0) continue;
    for (int j = 0; j < g.nv; ++j) col[j] = f.at(i, j);
    ClampedSpline sp(col, g.v_center(0), dv);
    for (int j = 0; j < g.nv; ++j) shifted[j] = sp.eval(g.v_center(j) - delta);
    for (int j = 0; j < g.nv; ++j) f.at(i, j) = shifted[j];
  }
}

DiagnosticsRow diagnostics_row(double t, const GriddedDistribution& f,
                               const MomentFields& m, const FieldState& fs,
                               double clipped_cumulative) {
  DiagnosticsRow d;
  d.t = t;
  d.mass = f.mass();
  double ke = 0.0;
  for (double p : m.pi) ke += p;
  d.kinetic_energy = 0.5 * ke * f.grid.dx();
  double fe = 0.0;
  for (double ev : fs.e) fe += ev * ev;
  d.field_energy = 0.5 * fs.epsilon * fs.epsilon * fe / static_cast<double>(fs.e.size());
  d.rho_min = *std::min_element(m.rho.begin(), m.rho.end());
  d.rho_max = *std::max_element(m.rho.begin(), m.rho.end());
  d.clipped_mass = clipped_cumulative;
  return d;
}

GriddedDistribution advance_split(const GriddedDistribution& f0, double epsilon,
                                  double dt, int steps, bool boltzmann,
                                  RunRecord* record,
                                  const StepperOptions& opt) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
  if (steps < 0) throw ArgumentError("steps must be nonnegative");
  if (dt > opt.c_osc * epsilon)
    throw CflError("dt " + format_double(dt) +
                   " does not resolve the plasma oscillation; use dt <= " +
                   format_double(opt.c_osc * epsilon));
  f0.check_nonnegative();

  auto solve_field = [&](const std::vector<double>& rho) -> FieldState {
    return boltzmann ? solve_poisson_boltzmann(rho, epsilon)
                     : solve_scaled_poisson(rho, epsilon);
  };

  GriddedDistribution f = f0;
  const double mass0 = f.mass();
  double clipped = 0.0;

  // Clip interpolation undershoots, then rescale back to the initial mass so
  // the field solve always sees an exactly balanced charge density.
  auto clip_and_rescale = [&]() {
    clipped += clip_negatives(f);
    const double m = f.mass();
    if (m > 0.0 && m != mass0) {
      const double scale = mass0 / m;
      for (double& v : f.values) v *= scale;
    }
  };

  if (record) {
    MomentFields m = moments(f);
    FieldState fs = solve_field(m.rho);
    record->times.push_back(0.0);
    record->rho.push_back(m.rho);
    record->j.push_back(m.j);
    record->e_field.push_back(fs.e);
    record->diagnostics.push_back(diagnostics_row(0.0, f, m, fs, 0.0));
  }

  for (int k = 0; k < steps; ++k) {
    advect_x(f, 0.5 * dt);
    clip_and_rescale();
    MomentFields m = moments(f);
    FieldState fs = solve_field(m.rho);
    advect_v(f, fs.e, dt);
    clip_and_rescale();
    advect_x(f, 0.5 * dt);
    clip_and_rescale();

    if (clipped > opt.clip_budget * mass0)
      throw TruncationError("clipped negative mass " + format_double(clipped) +
                            " exceeds budget " +
                            format_double(opt.clip_budget * mass0));
    double edge = f.boundary_mass_fraction();
    if (edge > opt.boundary_budget)
      throw TruncationError("velocity boundary layer holds mass fraction " +
                            format_double(edge) + " (budget " +
                            format_double(opt.boundary_budget) + ")");

    if (record) {
      double t = (k + 1) * dt;
      MomentFields m2 = moments(f);
      FieldState fs2 = solve_field(m2.rho);
      record->times.push_back(t);
      record->rho.push_back(m2.rho);
      record->j.push_back(m2.j);
      record->e_field.push_back(fs2.e);
      record->diagnostics.push_back(diagnostics_row(t, f, m2, fs2, clipped));
    }
  }
  return f;
}

}  // namespace

ParticleEnsemble free_flow(const ParticleEnsemble& e, double t) {
  e.validate();
  ParticleEnsemble out = e;
  for (std::size_t s = 0; s < e.size(); ++s) {
    std::array<double, 3> raw{0.0, 0.0, 0.0};
    for (int k = 0; k < e.dim; ++k) raw[k] = e.x[s][k] + t * e.v[s][k];
    out.x[s] = TorusPoint(e.dim, raw);
  }
  return out;
}

GriddedDistribution advance_vp(const GriddedDistribution& f, double epsilon,
                               double dt, int steps, RunRecord* record,
                               const StepperOptions& opt) {
  return advance_split(f, epsilon, dt, steps, false, record, opt);
}

GriddedDistribution advance_vpme(const GriddedDistribution& f, double epsilon,
                                 double dt, int steps, RunRecord* record,
                                 const StepperOptions& opt) {
  return advance_split(f, epsilon, dt, steps, true, record, opt);
}

ParticleEnsemble advance_mean_field(const ParticleEnsemble& p,
                                    const std::vector<SineKernel>& kernel,
                                    double dt, int steps) {
  p.validate();
  if (p.dim != 1) throw ArgumentError("advance_mean_field requires 1D ensembles");
  if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
  for (const SineKernel& k : kernel)
    if (k.m < 1) throw ArgumentError("kernel mode index must be >= 1");

  const std::size_t n = p.size();
  std::vector<double> x(n), v(n);
  for (std::size_t s = 0; s < n; ++s) {
    x[s] = p.x[s][0];
    v[s] = p.v[s][0];
  }

  // K(x) = sum b sin(2 pi m x)/(2 pi m) unfolds the convolution into two
  // weighted trigonometric sums per mode, so the force costs O(n) per step.
  auto force = [&](const std::vector<double>& xs, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const SineKernel& ker : kernel) {
      if (ker.b == 0.0) continue;
      const double om = kTwoPi * ker.m;
      double c_sum = 0.0, s_sum = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        c_sum += p.w[s] * std::cos(om * xs[s]);
        s_sum += p.w[s] * std::sin(om * xs[s]);
      }
      const double scale = ker.b / om;
      for (std::size_t s = 0; s < n; ++s) {
        out[s] += scale * (std::sin(om * xs[s]) * c_sum -
                           std::cos(om * xs[s]) * s_sum);
      }
    }
  };

  std::vector<double> acc(n, 0.0);
  for (int k = 0; k < steps; ++k) {
    force(x, acc);
    for (std::size_t s = 0; s < n; ++s) v[s] += 0.5 * dt * acc[s];
    for (std::size_t s = 0; s < n; ++s) x[s] = wrap_unit(x[s] + dt * v[s]);
    force(x, acc);
    for (std::size_t s = 0; s < n; ++s) v[s] += 0.5 * dt * acc[s];
  }

  ParticleEnsemble out = p;
  for (std::size_t s = 0; s < n; ++s) {
    out.x[s] = TorusPoint(x[s]);
    out.v[s] = {v[s], 0.0, 0.0};
  }
  return out;
}

SampledFieldHistory::SampledFieldHistory(
    std::vector<double> times, const std::vector<std::vector<double>>& rows)
    : times_(std::move(times)) {
  if (times_.size() != rows.size() || times_.empty())
    throw ArgumentError("field history: times and rows must match and be nonempty");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1]))
      throw ArgumentError("field history: times must be strictly increasing");
  splines_.reserve(rows.size());
  for (const std::vector<double>& r : rows) {
    double dx = 1.0 / static_cast<double>(r.size());
    splines_.emplace_back(r, 0.5 * dx, dx);
  }
}

double SampledFieldHistory::operator()(double t, double x) const {
  if (t <= times_.front()) return splines_.front().eval(x);
  if (t >= times_.back()) return splines_.back().eval(x);
  std::size_t hi =
      std::upper_bound(times_.begin(), times_.end(), t) - times_.begin();
  std::size_t lo = hi - 1;
  double theta = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return (1.0 - theta) * splines_[lo].eval(x) + theta * splines_[hi].eval(x);
}

CharacteristicPair integrate_pair(const FieldInTime& e1, const FieldInTime& e2,
                                  std::array<double, 2> z1,
                                  std::array<double, 2> z2, double dt,
                                  int steps) {
  if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
  if (steps < 1) throw ArgumentError("steps must be >= 1");

  // Lifted positions live on the real line; the torus only enters through
  // field evaluation (periodic in x) and the initial minimal image.
  double x1 = wrap_unit(z1[0]), x2 = wrap_unit(z2[0]);
  double v1 = z1[1], v2 = z2[1];
  double lift1 = x1, lift2 = x2;
  const double offset0 = torus_delta(x1, x2) - (lift1 - lift2);

  CharacteristicPair cp;
  const int m = steps + 1;
  cp.t.resize(m);
  cp.x1.resize(m);
  cp.v1.resize(m);
  cp.x2.resize(m);
  cp.v2.resize(m);
  cp.r.resize(m);
  cp.dv.resize(m);
  cp.residual.assign(m, 0.0);

  std::vector<double> ef1(m), ef2(m);  // fields along the trajectories
  auto store = [&](int k, double t) {
    cp.t[k] = t;
    cp.x1[k] = wrap_unit(lift1);
    cp.x2[k] = wrap_unit(lift2);
    cp.v1[k] = v1;
    cp.v2[k] = v2;
    cp.dv[k] = v1 - v2;
    cp.r[k] = (lift1 - lift2 + offset0) - t * (v1 - v2);
    ef1[k] = e1(t, cp.x1[k]);
    ef2[k] = e2(t, cp.x2[k]);
  };

  store(0, 0.0);
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    double a1 = e1(t, wrap_unit(lift1));
    double a2 = e2(t, wrap_unit(lift2));
    v1 += 0.5 * dt * a1;
    v2 += 0.5 * dt * a2;
    lift1 += dt * v1;
    lift2 += dt * v2;
    const double tn = t + dt;
    v1 += 0.5 * dt * e1(tn, wrap_unit(lift1));
    v2 += 0.5 * dt * e2(tn, wrap_unit(lift2));
    store(k + 1, tn);
  }

  // Discrete residual of dR/dt = -t (E1 - E2), centered differences at
  // interior samples.
  for (int k = 1; k < steps; ++k) {
    double drdt = (cp.r[k + 1] - cp.r[k - 1]) / (2.0 * dt);
    cp.residual[k] = std::abs(drdt + cp.t[k] * (ef1[k] - ef2[k]));
  }
  return cp;
}

FluidState isothermal_euler_step(const FluidState& s, double dt) {
  const int n = static_cast<int>(s.rho.size());
  if (n < 4 || s.u.size() != s.rho.size())
    throw ArgumentError("fluid state needs nx >= 4 matching cells");
  if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
  const double dx = 1.0 / n;

  double umax = 0.0;
  for (int i = 0; i < n; ++i) {
    if (s.rho[i] < 1e-12)
      throw DomainError("vacuum cell in fluid state at index " + std::to_string(i));
    umax = std::max(umax, std::abs(s.u[i]));
  }
  const double dt_max = 0.5 * dx / (umax + 1.0);
  if (dt > dt_max)
    throw CflError("fluid dt " + format_double(dt) + " violates CFL; use dt <= " +
                   format_double(dt_max));

  // Conserved variables and physical flux for p(rho) = rho (sound speed 1).
  std::vector<double> q(n), f_rho(n), f_q(n);
  for (int i = 0; i < n; ++i) {
    q[i] = s.rho[i] * s.u[i];
    f_rho[i] = q[i];
    f_q[i] = q[i] * s.u[i] + s.rho[i];
  }

  // Local Lax-Friedrichs interface fluxes; ss is the local wave-speed bound.
  std::vector<double> g_rho(n), g_q(n);  // flux at interface i+1/2
  for (int i = 0; i < n; ++i) {
    int r = (i + 1) % n;
    double ss = std::max(std::abs(s.u[i]) + 1.0, std::abs(s.u[r]) + 1.0);
    g_rho[i] = 0.5 * (f_rho[i] + f_rho[r]) - 0.5 * ss * (s.rho[r] - s.rho[i]);
    g_q[i] = 0.5 * (f_q[i] + f_q[r]) - 0.5 * ss * (q[r] - q[i]);
  }

  FluidState out;
  out.rho.resize(n);
  out.u.resize(n);
  const double lam = dt / dx;
  for (int i = 0; i < n; ++i) {
    int l = (i + n - 1) % n;
    double rho_new = s.rho[i] - lam * (g_rho[i] - g_rho[l]);
    double q_new = q[i] - lam * (g_q[i] - g_q[l]);
    out.rho[i] = rho_new;
    out.u[i] = q_new / rho_new;
  }
  return out;
}

FluidState advance_fluid(FluidState s, double elapsed, double cfl) {
  if (elapsed < 0.0) throw ArgumentError("elapsed time must be nonnegative");
  if (!(cfl > 0.0 && cfl < 1.0)) throw ArgumentError("cfl must be in (0,1)");
  if (elapsed == 0.0) return s;
  const double dx = 1.0 / static_cast<double>(s.rho.size());
  while (true) {
    double umax = 0.0;
    for (double u : s.u) umax = std::max(umax, std::abs(u));
    double dt_cap = cfl * 0.5 * dx / (umax + 1.0);
    if (elapsed <= dt_cap) return isothermal_euler_step(s, elapsed);
    // Uniform substeps sized for the current wave speed; re-check after.
    int nsub = static_cast<int>(std::ceil(elapsed / dt_cap));
    double dt = elapsed / nsub;
    s = isothermal_euler_step(s, dt);
    elapsed -= dt;
  }
}

}  // namespace kinlab
