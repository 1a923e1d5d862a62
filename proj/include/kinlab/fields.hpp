#pragma once

#include <vector>

namespace kinlab {

// Electrostatic potential and field on the spatial grid.  For the linear
// solves u has zero spatial mean; e = -u' computed spectrally.  epsilon
// records the Debye ratio used (0 marks the quasineutral limit solve).
struct FieldState {
  std::vector<double> u;
  std::vector<double> e;
  double epsilon = 0.0;
};

// Physical plasma parameters (SI or any coherent unit system).
struct PlasmaParameters {
  double temperature = 1.0;   // electron temperature T_e
  double density = 1.0;       // electron density n_e
  double permittivity = 1.0;  // vacuum permittivity
  double boltzmann = 1.0;     // Boltzmann constant
  double charge = 1.0;        // elementary charge
};

// Zero-mean spectral solution of -epsilon^2 U'' = rho - 1 on the unit torus.
// Requires mean(rho) = 1 within 1e-10 (neutrality) and epsilon > 0.
FieldState solve_scaled_poisson(const std::vector<double>& rho, double epsilon);

// Damped-Newton solution of epsilon^2 U'' = exp(U) - rho with sup-norm
// residual <= tol.  No mean normalization: the exponential pins the
// constant.  Initial guess U = log(max(rho, 1e-10)).
FieldState solve_poisson_boltzmann(const std::vector<double>& rho,
                                   double epsilon, double tol = 1e-10,
                                   int max_iterations = 50);

// Zero-mean spectral solution of -U'' = Pi'' (so U = -(Pi - mean Pi));
// epsilon is set to 0 to mark the limit regime.
FieldState solve_limit_potential(const std::vector<double>& pi);

double debye_length(const PlasmaParameters& p);

// Linearized screened response: U - epsilon^2 U'' = rho_ext with rho_ext a
// Gaussian bump of the given amplitude and width centered at x = 1/2.
// Requires width >= 3 dx and epsilon >= 2 dx so both scales are resolved.
std::vector<double> screening_profile(double defect_amplitude,
                                      double defect_width, double epsilon,
                                      int nx);

}  // namespace kinlab
