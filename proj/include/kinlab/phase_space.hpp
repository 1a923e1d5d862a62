#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kinlab/torus.hpp"

namespace kinlab {

// Uniform cell-centered grid on the phase space T^1 x [-v_max, v_max].
// Position cells cover [0,1) periodically; velocity cells cover the
// truncated interval.  Cell centers: x_i = (i + 1/2) dx, v_j = -v_max +
// (j + 1/2) dv.
struct PhaseGrid {
  int nx = 0;
  int nv = 0;
  double v_max = 0.0;

  PhaseGrid() = default;
  PhaseGrid(int nx_, int nv_, double v_max_);

  double dx() const { return 1.0 / nx; }
  double dv() const { return 2.0 * v_max / nv; }
  double x_center(int i) const { return (i + 0.5) * dx(); }
  double v_center(int j) const { return -v_max + (j + 0.5) * dv(); }

  bool operator==(const PhaseGrid& o) const {
    return nx == o.nx && nv == o.nv && v_max == o.v_max;
  }
};

// Nonnegative density values on a PhaseGrid, row-major with x as the slow
// index: values[i * nv + j] is the cell (x_i, v_j).
struct GriddedDistribution {
  PhaseGrid grid;
  std::vector<double> values;

  GriddedDistribution() = default;
  explicit GriddedDistribution(const PhaseGrid& g)
      : grid(g), values(static_cast<std::size_t>(g.nx) * g.nv, 0.0) {}

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.nv + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.nv + j]; }

  // Total mass: integral of f over phase space (midpoint rule, which is the
  // exact integral of the cellwise-constant interpretation).
  double mass() const;

  // Fraction of the mass sitting in the outermost velocity layers; used to
  // monitor velocity-domain truncation.
  double boundary_mass_fraction() const;

  // Throws ArgumentError if any value is negative beyond -tol.
  void check_nonnegative(double tol = 0.0) const;
};

// Velocity moments of a distribution, one value per position cell:
// rho = integral of f dv, j = integral of v f dv, pi = integral of v^2 f dv.
struct MomentFields {
  std::vector<double> rho;
  std::vector<double> j;
  std::vector<double> pi;
};

// Weighted particles (an empirical measure on T^d x R^d), d <= 3.  Weights
// are strictly positive and sum to one.
struct ParticleEnsemble {
  int dim = 1;
  std::vector<TorusPoint> x;
  std::vector<std::array<double, 3>> v;
  std::vector<double> w;

  std::size_t size() const { return w.size(); }

  // Validates the normalized-measure invariant; throws ArgumentError.
  void validate() const;
};

MomentFields moments(const GriddedDistribution& f);

// Draw n equally weighted particles from the cellwise-constant density f.
// The stream consumes, per particle, one uniform for the cell choice and
// one per coordinate for the in-cell offset, so results are reproducible.
ParticleEnsemble sample_particles(const GriddedDistribution& f, std::size_t n,
                                  std::uint64_t seed);

// Cloud-in-cell deposit of an ensemble onto a grid.  Periodic in x; in v the
// boundary tents are folded back into the edge cells so total mass is
// preserved.  Particles with |v| > v_max are an error (indices reported).
GriddedDistribution deposit(const ParticleEnsemble& p, const PhaseGrid& grid);

// Monokinetic lift rho(x) delta(v - u(x)) represented on the grid with a
// two-cell tent in v.  Position moments rho and j are reproduced exactly;
// pi picks up at most dv^2/4 * rho of smearing per cell.  Each u_i must lie
// within [-v_max + dv/2, v_max - dv/2].
GriddedDistribution monokinetic_lift(const std::vector<double>& rho,
                                     const std::vector<double>& u,
                                     const PhaseGrid& grid);

// Plain-text serialization: "nx nv v_max" header line, then nx lines of nv
// values (x-major).  Numbers round-trip exactly.
void write_distribution(std::ostream& out, const GriddedDistribution& f);
GriddedDistribution read_distribution(std::istream& in);
void save_distribution(const std::string& path, const GriddedDistribution& f);
GriddedDistribution load_distribution(const std::string& path);

// CSV serialization of ensembles: header x_0,..,x_{d-1},v_0,..,v_{d-1},w.
void write_ensemble(std::ostream& out, const ParticleEnsemble& p);
ParticleEnsemble read_ensemble(std::istream& in);
void save_ensemble(const std::string& path, const ParticleEnsemble& p);
ParticleEnsemble load_ensemble(const std::string& path);

}  // namespace kinlab
