#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "kinlab/fields.hpp"
#include "kinlab/interp.hpp"
#include "kinlab/phase_space.hpp"

namespace kinlab {

// Exact free transport S_t(x,v) = (x + t v, v) on the torus.
ParticleEnsemble free_flow(const ParticleEnsemble& e, double t);

struct StepperOptions {
  double c_osc = 0.2;            // plasma-oscillation resolution: dt <= c_osc*eps
  double clip_budget = 1e-6;     // cumulative clipped mass / initial mass
  double boundary_budget = 1e-6; // admissible mass fraction in edge v-layers
};

struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  double kinetic_energy = 0.0;
  double field_energy = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double clipped_mass = 0.0;  // cumulative
};

// Optional per-run tap: state at every step boundary (including t = 0).
struct RunRecord {
  std::vector<double> times;
  std::vector<std::vector<double>> rho;
  std::vector<std::vector<double>> j;  // current density (first v-moment)
  std::vector<std::vector<double>> e_field;
  std::vector<DiagnosticsRow> diagnostics;
};

// Strang-split semi-Lagrangian step for the scaled Vlasov-Poisson system:
// half x-advection, field solve on the updated density, full v-advection,
// half x-advection.  Periodic cubic splines in x, clamped-zero cubic in v.
GriddedDistribution advance_vp(const GriddedDistribution& f, double epsilon,
                               double dt, int steps,
                               RunRecord* record = nullptr,
                               const StepperOptions& opt = {});

// Same splitting with the Poisson-Boltzmann field solve (massless electrons).
GriddedDistribution advance_vpme(const GriddedDistribution& f, double epsilon,
                                 double dt, int steps,
                                 RunRecord* record = nullptr,
                                 const StepperOptions& opt = {});

// Smooth interaction kernel K(x) = sum_m b_m sin(2 pi m_m x) / (2 pi m_m);
// the mean-field force is the weighted convolution F(x) = sum_j w_j K(x-x_j),
// with Lipschitz constant sum_m |b_m|.
struct SineKernel {
  double b = 0.0;
  int m = 1;
};

// Leapfrog (kick-drift-kick) evolution of an ensemble under its own
// mean-field kernel force.  Exactly restartable: splitting a run into
// chunks reproduces the unchunked trajectory bit-for-bit.
ParticleEnsemble advance_mean_field(const ParticleEnsemble& p,
                                    const std::vector<SineKernel>& kernel,
                                    double dt, int steps);

// Time-dependent field closure evaluable at arbitrary (t, x).
class FieldInTime {
 public:
  virtual ~FieldInTime() = default;
  virtual double operator()(double t, double x) const = 0;
};

class ZeroField : public FieldInTime {
 public:
  double operator()(double, double) const override { return 0.0; }
};

class CallableField : public FieldInTime {
 public:
  explicit CallableField(std::function<double(double, double)> f)
      : f_(std::move(f)) {}
  double operator()(double t, double x) const override { return f_(t, x); }

 private:
  std::function<double(double, double)> f_;
};

// Field history frozen from stepper output: periodic cubic spline in x at
// each stored time, linear interpolation in t, clamped to the end slices
// outside the stored range.
class SampledFieldHistory : public FieldInTime {
 public:
  SampledFieldHistory(std::vector<double> times,
                      const std::vector<std::vector<double>>& rows);
  double operator()(double t, double x) const override;

 private:
  std::vector<double> times_;
  std::vector<PeriodicSpline> splines_;
};

// Two characteristics integrated side by side, with the free-transport
// defect R(t) = X1 - X2 - t (V1 - V2) tracked on a consistent lift.
struct CharacteristicPair {
  std::vector<double> t;
  std::vector<double> x1, v1, x2, v2;  // x wrapped into [0,1)
  std::vector<double> r;
  std::vector<double> dv;        // V1 - V2
  std::vector<double> residual;  // |dR/dt + t (E1 - E2)|, centered in time
};

CharacteristicPair integrate_pair(const FieldInTime& e1, const FieldInTime& e2,
                                  std::array<double, 2> z1,
                                  std::array<double, 2> z2, double dt,
                                  int steps);

// Isothermal Euler (pressure p = rho, sound speed 1) on the unit torus.
struct FluidState {
  std::vector<double> rho;
  std::vector<double> u;
};

// One conservative local Lax-Friedrichs step.  Requires the CFL bound
// dt <= 0.5 dx / (max|u| + 1); preserves positivity of rho under it.
FluidState isothermal_euler_step(const FluidState& s, double dt);

// Advance by elapsed time T using uniform substeps at the given CFL number;
// lands on T exactly.
FluidState advance_fluid(FluidState s, double elapsed, double cfl = 0.45);

}  // namespace kinlab
