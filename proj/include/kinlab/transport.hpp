#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "kinlab/phase_space.hpp"

namespace kinlab {

// Ground cost on phase space:
//  - standard:     d_T(x,y)^p + |v-w|^p                           (p in {1,2})
//  - free_adapted: |(x-y) - t (v-w)|^p + |v-w|^p  (pullback by free flow)
//  - kinetic:      lambda |dX|^2 + |dV|^2 with the implicit weight
//                  lambda = eps^-2 max(1, |log Q|) fixed-pointed on Q.
enum class CostKind { standard, free_adapted, kinetic };

struct CostSpec {
  CostKind kind = CostKind::standard;
  int p = 2;
  double t = 0.0;
  double epsilon = 1.0;

  static CostSpec standard_p(int p);
  static CostSpec free_adapted(double t, int p = 2);
  static CostSpec kinetic(double epsilon);
  void validate() const;
};

// Transport plan between two ensembles, sparse (i, j, mass) triples in
// lexicographic order.
struct Coupling {
  struct Entry {
    int i;
    int j;
    double mass;
  };
  std::vector<Entry> plan;

  // Verifies row/column sums against the ensembles' weights (tol 1e-10).
  void check_marginals(const ParticleEnsemble& a, const ParticleEnsemble& b,
                       double tol = 1e-10) const;
};

struct OtResult {
  Coupling coupling;
  // For standard / free_adapted: the p-rooted distance value.
  // For kinetic: the fixed-point cost Q.
  double cost = 0.0;
};

// Exact 1D Wasserstein-1.  Grid version: cellwise-constant densities on a
// uniform grid over [0,1]; atom version: weighted point masses.  On the
// line the value is the integral of |CDF difference|; on the torus the
// constant shift is optimized (Lebesgue median of the antiderivative).
enum class Space { line, torus };
double w1_1d(const std::vector<double>& mu_density,
             const std::vector<double>& nu_density, Space space);
double w1_1d(std::vector<std::pair<double, double>> mu_atoms,
             std::vector<std::pair<double, double>> nu_atoms, Space space);

// Cost of a single pair under the given CostSpec; for the kinetic kind the
// weight lambda must be supplied by the caller.
double pair_cost(const CostSpec& spec, const TorusPoint& xa,
                 const std::array<double, 3>& va, const TorusPoint& xb,
                 const std::array<double, 3>& vb, int dim,
                 double lambda = 1.0);

// Exact optimal coupling.  Equal-weight ensembles of equal size go through
// the assignment solver (cap equal_cap); anything else through the
// transportation solver (cap general_cap per side).
OtResult exact_discrete_ot(const ParticleEnsemble& a, const ParticleEnsemble& b,
                           const CostSpec& cost, std::size_t equal_cap = 2000,
                           std::size_t general_cap = 500);

// W_p between the ensembles pulled back by free transport over time t:
// exact_discrete_ot on S_{-t}-transported points with the standard cost.
double adapted_distance(const ParticleEnsemble& a, const ParticleEnsemble& b,
                        double t, int p = 2);

// Sampled trajectories for a fixed set of particles: positions are stored
// as continuous lifts on the real line (never re-wrapped), so displacement
// differences along the flow stay consistent.
struct TrajectoryTable {
  std::vector<double> times;
  std::vector<std::vector<double>> x_lift;  // [time][particle]
  std::vector<std::vector<double>> v;       // [time][particle]

  std::size_t particles() const { return times.empty() ? 0 : x_lift[0].size(); }
  // Linear interpolation in t; exact at stored times.
  void eval(double t, std::size_t particle, double& x, double& v_out) const;
};

// Free-flow trajectory table: x_lift = x0 + t v exactly.
TrajectoryTable free_flow_table(const ParticleEnsemble& e,
                                const std::vector<double>& times);

// Coupling-averaged cost along two frozen flows at time t.  The initial
// minimal image fixes each pair's lift offset once; standard/free_adapted
// values are p-rooted, kinetic returns the fixed-point Q.
double pushforward_cost(const Coupling& pi0, const TrajectoryTable& flow1,
                        const TrajectoryTable& flow2, double t,
                        const CostSpec& cost);

// Result of the implicitly weighted kinetic cost.
struct QState {
  double q = 0.0;
  double lambda = 0.0;
  bool valid = false;
};

// Displacement data of a coupling: per-pair mass, minimal-image position
// displacement, velocity displacement.
struct CoupledDisplacements {
  std::vector<double> mass;
  std::vector<double> dx;
  std::vector<double> dv;
};

// Solve Q = eps^-2 max(1, |log Q|) A + B on (0, q_ceiling] by bisection,
// with A = sum m dx^2 and B = sum m dv^2.  valid=false when no root exists
// below the ceiling.
QState kinetic_q(const CoupledDisplacements& d, double epsilon);
QState kinetic_q_from_moments(double a, double b, double epsilon,
                              double q_ceiling = 0.36787944117144233);

// C_B(t) = min{ (1+t) exp((2/3) B ((1+t)^3 - 1)), exp((1+2B) t) }.
double dobrushin_constant(double b, double t);

// exp(-((sqrt|log q0| - (C/eps) a_integral)_+)^2).
double kinetic_loeper_bound(double q0, double epsilon, double a_integral,
                            double c);

// M = (1/eps) * trapezoid integral of the density-sup series over [0, T];
// threshold = exp(-kappa M^2).
struct BudgetResult {
  double m = 0.0;
  double threshold = 0.0;
};
BudgetResult stability_budget(const std::vector<double>& times,
                              const std::vector<double>& density_sup,
                              double epsilon, double t_final, double kappa);

}  // namespace kinlab
