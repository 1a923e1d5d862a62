#include "kinlab/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kinlab/csvio.hpp"
#include "kinlab/errors.hpp"
#include "kinlab/rng.hpp"

namespace kinlab {

PhaseGrid::PhaseGrid(int nx_, int nv_, double v_max_)
    : nx(nx_), nv(nv_), v_max(v_max_) {
  if (nx < 4 || nv < 4) throw ArgumentError("grid needs at least 4 cells per axis");
  if (!(v_max > 0.0)) throw ArgumentError("v_max must be positive");
}

double GriddedDistribution::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.dx() * grid.dv();
}

double GriddedDistribution::boundary_mass_fraction() const {
  double total = 0.0, edge = 0.0;
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.nv; ++j) {
      double v = at(i, j);
      total += v;
      if (j == 0 || j == grid.nv - 1) edge += v;
    }
  }
  if (total <= 0.0) return 0.0;
  return edge / total;
}

void GriddedDistribution::check_nonnegative(double tol) const {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] < -tol) {
      throw ArgumentError("distribution has negative value " +
                          format_double(values[k]) + " at flat index " +
                          std::to_string(k));
    }
  }
}

void ParticleEnsemble::validate() const {
  if (dim < 1 || dim > 3) throw ArgumentError("ensemble dimension must be 1..3");
  if (x.size() != w.size() || v.size() != w.size())
    throw ArgumentError("ensemble arrays have mismatched lengths");
  if (w.empty()) throw ArgumentError("ensemble is empty");
  double s = 0.0;
  for (double wi : w) {
    if (!(wi > 0.0)) throw ArgumentError("ensemble weights must be positive");
    s += wi;
  }
  if (std::abs(s - 1.0) > 1e-12)
    throw ArgumentError("ensemble weights sum to " + format_double(s) +
                        ", expected 1 within 1e-12");
}

MomentFields moments(const GriddedDistribution& f) {
  const PhaseGrid& g = f.grid;
  MomentFields m;
  m.rho.assign(g.nx, 0.0);
  m.j.assign(g.nx, 0.0);
  m.pi.assign(g.nx, 0.0);
  const double dv = g.dv();
  for (int i = 0; i < g.nx; ++i) {
    double r = 0.0, mom = 0.0, sec = 0.0;
    for (int jj = 0; jj < g.nv; ++jj) {
      double val = f.at(i, jj);
      double vc = g.v_center(jj);
      r += val;
      mom += val * vc;
      sec += val * vc * vc;
    }
    m.rho[i] = r * dv;
    m.j[i] = mom * dv;
    m.pi[i] = sec * dv;
  }
  return m;
}

ParticleEnsemble sample_particles(const GriddedDistribution& f, std::size_t n,
                                  std::uint64_t seed) {
  if (n == 0) throw ArgumentError("cannot sample zero particles");
  f.check_nonnegative();
  const PhaseGrid& g = f.grid;
  const std::size_t ncell = f.values.size();

  std::vector<double> cdf(ncell);
  double acc = 0.0;
  for (std::size_t k = 0; k < ncell; ++k) {
    acc += f.values[k];
    cdf[k] = acc;
  }
  if (!(acc > 0.0)) throw ArgumentError("cannot sample from zero distribution");

  ParticleEnsemble p;
  p.dim = 1;
  p.x.reserve(n);
  p.v.reserve(n);
  p.w.assign(n, 1.0 / static_cast<double>(n));

  Rng rng(seed);
  for (std::size_t s = 0; s < n; ++s) {
    double u = rng.uniform() * acc;
    std::size_t k = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    if (k >= ncell) k = ncell - 1;
    int i = static_cast<int>(k) / g.nv;
    int j = static_cast<int>(k) % g.nv;
    double xo = rng.uniform();
    double vo = rng.uniform();
    p.x.emplace_back((i + xo) * g.dx());
    p.v.push_back({-g.v_max + (j + vo) * g.dv(), 0.0, 0.0});
  }
  return p;
}

GriddedDistribution deposit(const ParticleEnsemble& p, const PhaseGrid& grid) {
  p.validate();
  if (p.dim != 1) throw ArgumentError("deposit requires a 1D ensemble");

  std::vector<std::size_t> bad;
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (std::abs(p.v[s][0]) > grid.v_max) {
      bad.push_back(s);
      if (bad.size() >= 8) break;
    }
  }
  if (!bad.empty()) {
    std::string msg = "deposit: velocities outside [-v_max, v_max] at indices";
    for (std::size_t s : bad) msg += " " + std::to_string(s);
    throw DomainError(msg);
  }

  GriddedDistribution f(grid);
  const double dx = grid.dx(), dv = grid.dv();
  const double cell_inv = 1.0 / (dx * dv);
  for (std::size_t s = 0; s < p.size(); ++s) {
    // Position: periodic linear (cloud-in-cell) weights between the two
    // nearest cell centers.
    double gx = p.x[s][0] / dx - 0.5;
    double fx = std::floor(gx);
    double tx = gx - fx;
    int i0 = static_cast<int>(fx);
    i0 = ((i0 % grid.nx) + grid.nx) % grid.nx;
    int i1 = (i0 + 1) % grid.nx;

    // Velocity: same tent, but spill past the edge cells is folded back so
    // the deposit conserves mass exactly.
    double gv = (p.v[s][0] + grid.v_max) / dv - 0.5;
    double tv = gv - std::floor(gv);
    int j0 = static_cast<int>(std::floor(gv));
    int j1 = j0 + 1;
    if (j0 < 0) { j0 = 0; j1 = 0; tv = 0.0; }
    if (j1 > grid.nv - 1) { j0 = grid.nv - 1; j1 = grid.nv - 1; tv = 0.0; }

    const double wgt = p.w[s] * cell_inv;
    f.at(i0, j0) += wgt * (1.0 - tx) * (1.0 - tv);
    f.at(i0, j1) += wgt * (1.0 - tx) * tv;
    f.at(i1, j0) += wgt * tx * (1.0 - tv);
    f.at(i1, j1) += wgt * tx * tv;
  }
  return f;
}

GriddedDistribution monokinetic_lift(const std::vector<double>& rho,
                                     const std::vector<double>& u,
                                     const PhaseGrid& grid) {
  if (static_cast<int>(rho.size()) != grid.nx ||
      static_cast<int>(u.size()) != grid.nx)
    throw ArgumentError("monokinetic_lift: rho and u must have length nx");
  const double dv = grid.dv();
  const double lo = -grid.v_max + 0.5 * dv;
  const double hi = grid.v_max - 0.5 * dv;

  GriddedDistribution f(grid);
  for (int i = 0; i < grid.nx; ++i) {
    if (!(rho[i] >= 0.0))
      throw ArgumentError("monokinetic_lift: rho must be nonnegative");
    if (u[i] < lo || u[i] > hi)
      throw DomainError("monokinetic_lift: u[" + std::to_string(i) +
                        "] = " + format_double(u[i]) +
                        " outside the interior velocity range");
    double gv = (u[i] + grid.v_max) / dv - 0.5;
    double fv = std::floor(gv);
    double tv = gv - fv;
    int j0 = static_cast<int>(fv);
    int j1 = j0 + 1;
    if (j1 > grid.nv - 1) { j1 = grid.nv - 1; j0 = j1 - 1; tv = 1.0; }
    f.at(i, j0) += rho[i] * (1.0 - tv) / dv;
    f.at(i, j1) += rho[i] * tv / dv;
  }
  return f;
}

void write_distribution(std::ostream& out, const GriddedDistribution& f) {
  out << f.grid.nx << ' ' << f.grid.nv << ' ' << format_double(f.grid.v_max)
      << '\n';
  for (int i = 0; i < f.grid.nx; ++i) {
    for (int j = 0; j < f.grid.nv; ++j) {
      if (j) out << ' ';
      out << format_double(f.at(i, j));
    }
    out << '\n';
  }
}

GriddedDistribution read_distribution(std::istream& in) {
  int nx = 0, nv = 0;
  double v_max = 0.0;
  if (!(in >> nx >> nv >> v_max))
    throw ArgumentError("distribution file: malformed header");
  PhaseGrid g(nx, nv, v_max);
  GriddedDistribution f(g);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (!(in >> f.values[k]))
      throw ArgumentError("distribution file: expected " +
                          std::to_string(f.values.size()) +
                          " values, failed at index " + std::to_string(k));
  }
  f.check_nonnegative();
  return f;
}

void save_distribution(const std::string& path, const GriddedDistribution& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot open file for writing: " + path);
  write_distribution(out, f);
}

GriddedDistribution load_distribution(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open file: " + path);
  return read_distribution(in);
}

void write_ensemble(std::ostream& out, const ParticleEnsemble& p) {
  p.validate();
  for (int k = 0; k < p.dim; ++k) out << "x_" << k << ',';
  for (int k = 0; k < p.dim; ++k) out << "v_" << k << ',';
  out << "w\n";
  for (std::size_t s = 0; s < p.size(); ++s) {
    for (int k = 0; k < p.dim; ++k) out << format_double(p.x[s][k]) << ',';
    for (int k = 0; k < p.dim; ++k) out << format_double(p.v[s][k]) << ',';
    out << format_double(p.w[s]) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

ParticleEnsemble read_ensemble(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw ArgumentError("ensemble file: missing header");
  std::vector<std::string> header = split_csv_line(line);
  if (header.empty() || header.back() != "w" || header.size() % 2 == 0)
    throw ArgumentError("ensemble file: malformed header");
  int dim = static_cast<int>((header.size() - 1) / 2);
  if (dim < 1 || dim > 3)
    throw ArgumentError("ensemble file: dimension must be 1..3");

  ParticleEnsemble p;
  p.dim = dim;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ArgumentError("ensemble file: wrong cell count on line " +
                          std::to_string(lineno));
    std::array<double, 3> xs{0, 0, 0}, vs{0, 0, 0};
    double wv = 0.0;
    try {
      for (int k = 0; k < dim; ++k) xs[k] = std::stod(cells[k]);
      for (int k = 0; k < dim; ++k) vs[k] = std::stod(cells[dim + k]);
      wv = std::stod(cells[2 * dim]);
    } catch (const std::exception&) {
      throw ArgumentError("ensemble file: unparsable number on line " +
                          std::to_string(lineno));
    }
    p.x.emplace_back(dim, xs);
    p.v.push_back(vs);
    p.w.push_back(wv);
  }
  p.validate();
  return p;
}

void save_ensemble(const std::string& path, const ParticleEnsemble& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot open file for writing: " + path);
  write_ensemble(out, p);
}

ParticleEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open file: " + path);
  return read_ensemble(in);
}

}  // namespace kinlab
