#include "kinlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kinlab/assignment.hpp"
#include "kinlab/csvio.hpp"
#include "kinlab/errors.hpp"
#include "kinlab/torus.hpp"

namespace kinlab {

CostSpec CostSpec::standard_p(int p) {
  CostSpec s;
  s.kind = CostKind::standard;
  s.p = p;
  s.validate();
  return s;
}

CostSpec CostSpec::free_adapted(double t, int p) {
  CostSpec s;
  s.kind = CostKind::free_adapted;
  s.t = t;
  s.p = p;
  s.validate();
  return s;
}

CostSpec CostSpec::kinetic(double epsilon) {
  CostSpec s;
  s.kind = CostKind::kinetic;
  s.epsilon = epsilon;
  s.p = 2;
  s.validate();
  return s;
}

void CostSpec::validate() const {
  if (p != 1 && p != 2) throw ArgumentError("cost order p must be 1 or 2");
  if (t < 0.0) throw ArgumentError("cost time parameter must be >= 0");
  if (!(epsilon > 0.0)) throw ArgumentError("cost epsilon must be positive");
}

void Coupling::check_marginals(const ParticleEnsemble& a,
                               const ParticleEnsemble& b, double tol) const {
  std::vector<double> row(a.size(), 0.0), col(b.size(), 0.0);
  for (const Entry& e : plan) {
    if (e.i < 0 || e.j < 0 || e.i >= static_cast<int>(a.size()) ||
        e.j >= static_cast<int>(b.size()))
      throw ArgumentError("coupling entry out of range");
    if (e.mass < 0.0) throw ArgumentError("coupling has negative mass");
    row[e.i] += e.mass;
    col[e.j] += e.mass;
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(row[i] - a.w[i]) > tol)
      throw ArgumentError("coupling row marginal off by " +
                          format_double(row[i] - a.w[i]) + " at index " +
                          std::to_string(i));
  for (std::size_t j = 0; j < b.size(); ++j)
    if (std::abs(col[j] - b.w[j]) > tol)
      throw ArgumentError("coupling column marginal off by " +
                          format_double(col[j] - b.w[j]) + " at index " +
                          std::to_string(j));
}

namespace {

// Integral of |g| over a segment of length len on which g is linear from
// g0 to g1, splitting at the sign change.
double abs_linear_integral(double g0, double g1, double len) {
  if (len <= 0.0) return 0.0;
  if ((g0 >= 0.0 && g1 >= 0.0) || (g0 <= 0.0 && g1 <= 0.0))
    return 0.5 * (std::abs(g0) + std::abs(g1)) * len;
  double root = g0 / (g0 - g1) * len;  // distance to the zero crossing
  return 0.5 * (std::abs(g0) * root + std::abs(g1) * (len - root));
}

// Lebesgue measure of {x : G(x) <= c} for the piecewise-linear function
// with edge values edges[] on segments of uniform length seg.
double sublevel_measure(const std::vector<double>& edges, double seg, double c) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double lo = std::min(edges[i], edges[i + 1]);
    double hi = std::max(edges[i], edges[i + 1]);
    if (hi <= c) {
      m += seg;
    } else if (lo <= c && hi > lo) {
      m += seg * (c - lo) / (hi - lo);
    } else if (lo <= c) {  // flat segment at value lo = hi <= c
      m += seg;
    }
  }
  return m;
}

}  // namespace

double w1_1d(const std::vector<double>& mu_density,
             const std::vector<double>& nu_density, Space space) {
  const std::size_t n = mu_density.size();
  if (n < 2 || nu_density.size() != n)
    throw ArgumentError("w1_1d: densities must share a grid with >= 2 cells");
  const double dx = 1.0 / static_cast<double>(n);
  double mass_mu = 0.0, mass_nu = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mass_mu += mu_density[i] * dx;
    mass_nu += nu_density[i] * dx;
  }
  if (std::abs(mass_mu - mass_nu) > 1e-9)
    throw ArgumentError("w1_1d: total masses differ by " +
                        format_double(mass_mu - mass_nu));

  // Antiderivative of (mu - nu) at cell edges; piecewise linear between.
  std::vector<double> g(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    g[i + 1] = g[i] + (mu_density[i] - nu_density[i]) * dx;

  double shift = 0.0;
  if (space == Space::torus) {
    // Optimal constant = Lebesgue median of G: smallest c with
    // measure{G <= c} >= 1/2, found by bisection.
    double lo = *std::min_element(g.begin(), g.end());
    double hi = *std::max_element(g.begin(), g.end());
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      double mid = 0.5 * (lo + hi);
      if (sublevel_measure(g, dx, mid) >= 0.5)
        hi = mid;
      else
        lo = mid;
    }
    shift = hi;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    total += abs_linear_integral(g[i] - shift, g[i + 1] - shift, dx);
  return total;
}

double w1_1d(std::vector<std::pair<double, double>> mu_atoms,
             std::vector<std::pair<double, double>> nu_atoms, Space space) {
  if (mu_atoms.empty() || nu_atoms.empty())
    throw ArgumentError("w1_1d: empty atom list");
  double mass_mu = 0.0, mass_nu = 0.0;
  for (auto& a : mu_atoms) mass_mu += a.second;
  for (auto& a : nu_atoms) mass_nu += a.second;
  if (std::abs(mass_mu - mass_nu) > 1e-9)
    throw ArgumentError("w1_1d: total masses differ by " +
                        format_double(mass_mu - mass_nu));
  if (space == Space::torus) {
    for (auto& a : mu_atoms) a.first = wrap_unit(a.first);
    for (auto& a : nu_atoms) a.first = wrap_unit(a.first);
  }

  // Signed event list: weight contributes +w for mu, -w for nu.
  std::vector<std::pair<double, double>> events;
  events.reserve(mu_atoms.size() + nu_atoms.size());
  for (auto& a : mu_atoms) events.emplace_back(a.first, a.second);
  for (auto& a : nu_atoms) events.emplace_back(a.first, -a.second);
  std::sort(events.begin(), events.end());

  if (space == Space::line) {
    double total = 0.0, g = 0.0;
    for (std::size_t k = 0; k + 1 < events.size(); ++k) {
      g += events[k].second;
      total += std::abs(g) * (events[k + 1].first - events[k].first);
    }
    return total;
  }

  // Torus: G is piecewise constant on the circle; shift by the weighted
  // median of its values (weights = segment lengths).
  std::vector<std::pair<double, double>> segs;  // (value, length)
  double g = 0.0;
  if (events.front().first > 0.0) segs.emplace_back(0.0, events.front().first);
  for (std::size_t k = 0; k < events.size(); ++k) {
    g += events[k].second;
    double next = (k + 1 < events.size()) ? events[k + 1].first : 1.0;
    if (next > events[k].first) segs.emplace_back(g, next - events[k].first);
  }
  std::sort(segs.begin(), segs.end());
  double half = 0.0;
  for (auto& s : segs) half += s.second;
  half *= 0.5;
  double acc = 0.0, median = segs.back().first;
  for (auto& s : segs) {
    acc += s.second;
    if (acc >= half) {
      median = s.first;
      break;
    }
  }
  double total = 0.0;
  for (auto& s : segs) total += std::abs(s.first - median) * s.second;
  return total;
}

double pair_cost(const CostSpec& spec, const TorusPoint& xa,
                 const std::array<double, 3>& va, const TorusPoint& xb,
                 const std::array<double, 3>& vb, int dim, double lambda) {
  double dv2 = 0.0;
  for (int k = 0; k < dim; ++k) {
    double d = va[k] - vb[k];
    dv2 += d * d;
  }
  double dx2 = 0.0;
  switch (spec.kind) {
    case CostKind::standard:
    case CostKind::kinetic: {
      for (int k = 0; k < dim; ++k) {
        double d = torus_delta(xa[k], xb[k]);
        dx2 += d * d;
      }
      break;
    }
    case CostKind::free_adapted: {
      for (int k = 0; k < dim; ++k) {
        double d = torus_delta(wrap_unit(xa[k] - spec.t * va[k]),
                               wrap_unit(xb[k] - spec.t * vb[k]));
        dx2 += d * d;
      }
      break;
    }
  }
  if (spec.kind == CostKind::kinetic) return lambda * dx2 + dv2;
  if (spec.p == 1) return std::sqrt(dx2) + std::sqrt(dv2);
  return dx2 + dv2;
}

namespace {

struct PlanAndIntegral {
  Coupling coupling;
  double integral = 0.0;
  double a_moment = 0.0;  // sum m dX^2 (minimal image)
  double b_moment = 0.0;  // sum m dV^2
};

PlanAndIntegral solve_plan(const ParticleEnsemble& a, const ParticleEnsemble& b,
                           const CostSpec& spec, double lambda,
                           std::size_t equal_cap, std::size_t general_cap) {
  const std::size_t na = a.size(), nb = b.size();
  bool equal_weights = (na == nb);
  if (equal_weights) {
    const double wu = 1.0 / static_cast<double>(na);
    for (std::size_t i = 0; i < na && equal_weights; ++i)
      if (std::abs(a.w[i] - wu) > 1e-12 || std::abs(b.w[i] - wu) > 1e-12)
        equal_weights = false;
  }

  PlanAndIntegral out;
  auto account = [&](int i, int j, double mass) {
    double c = pair_cost(spec, a.x[i], a.v[i], b.x[j], b.v[j], a.dim, lambda);
    out.integral += mass * c;
    double dx2 = 0.0, dv2 = 0.0;
    for (int k = 0; k < a.dim; ++k) {
      double dxi = torus_delta(a.x[i][k], b.x[j][k]);
      double dvi = a.v[i][k] - b.v[j][k];
      dx2 += dxi * dxi;
      dv2 += dvi * dvi;
    }
    out.a_moment += mass * dx2;
    out.b_moment += mass * dv2;
  };

  if (equal_weights) {
    if (na > equal_cap)
      throw SizeError("exact_discrete_ot: " + std::to_string(na) +
                      " points exceeds the equal-weight cap " +
                      std::to_string(equal_cap) + "; subsample the ensembles");
    const int n = static_cast<int>(na);
    std::vector<double> cost(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        cost[static_cast<std::size_t>(i) * n + j] =
            pair_cost(spec, a.x[i], a.v[i], b.x[j], b.v[j], a.dim, lambda);
    std::vector<int> match = solve_assignment(cost, n);
    for (int i = 0; i < n; ++i) {
      out.coupling.plan.push_back({i, match[i], a.w[i]});
      account(i, match[i], a.w[i]);
    }
  } else {
    if (na > general_cap || nb > general_cap)
      throw SizeError("exact_discrete_ot: sizes " + std::to_string(na) + "x" +
                      std::to_string(nb) + " exceed the general-weight cap " +
                      std::to_string(general_cap) + "; subsample the ensembles");
    std::vector<double> cost(na * nb);
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t j = 0; j < nb; ++j)
        cost[i * nb + j] =
            pair_cost(spec, a.x[i], a.v[i], b.x[j], b.v[j], a.dim, lambda);
    std::vector<double> flow = solve_transportation(a.w, b.w, cost);
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t j = 0; j < nb; ++j) {
        double m = flow[i * nb + j];
        if (m > 0.0) {
          out.coupling.plan.push_back(
              {static_cast<int>(i), static_cast<int>(j), m});
          account(static_cast<int>(i), static_cast<int>(j), m);
        }
      }
  }
  return out;
}

}  // namespace

OtResult exact_discrete_ot(const ParticleEnsemble& a, const ParticleEnsemble& b,
                           const CostSpec& cost, std::size_t equal_cap,
                           std::size_t general_cap) {
  a.validate();
  b.validate();
  if (a.dim != b.dim)
    throw ArgumentError("exact_discrete_ot: dimension mismatch");
  cost.validate();

  if (cost.kind != CostKind::kinetic) {
    PlanAndIntegral sol = solve_plan(a, b, cost, 1.0, equal_cap, general_cap);
    OtResult res;
    res.coupling = std::move(sol.coupling);
    res.cost = (cost.p == 1) ? sol.integral : std::sqrt(sol.integral);
    return res;
  }

  // Kinetic cost: the weight lambda depends on the optimal value Q, which
  // depends on the plan chosen under lambda; iterate the two to a joint
  // fixed point.
  const double inv2 = 1.0 / (cost.epsilon * cost.epsilon);
  double lambda = inv2;  // corresponds to Q at the smallness ceiling
  std::vector<double> lambda_history;
  for (int it = 0; it < 100; ++it) {
    PlanAndIntegral sol = solve_plan(a, b, cost, lambda, equal_cap, general_cap);
    QState qs = kinetic_q_from_moments(sol.a_moment, sol.b_moment, cost.epsilon);
    if (!qs.valid)
      throw DomainError(
          "exact_discrete_ot: kinetic cost has no fixed point below the "
          "smallness ceiling");
    lambda_history.push_back(qs.lambda);
    if (std::abs(qs.lambda - lambda) <= 1e-12 * std::max(1.0, lambda)) {
      OtResult res;
      res.coupling = std::move(sol.coupling);
      res.cost = qs.q;
      return res;
    }
    lambda = qs.lambda;
  }
  throw ConvergenceError("exact_discrete_ot: kinetic weight iteration did not settle",
                         lambda_history);
}

double adapted_distance(const ParticleEnsemble& a, const ParticleEnsemble& b,
                        double t, int p) {
  if (t < 0.0) throw ArgumentError("adapted_distance: t must be >= 0");
  return exact_discrete_ot(a, b, CostSpec::free_adapted(t, p)).cost;
}

void TrajectoryTable::eval(double t, std::size_t particle, double& x,
                           double& v_out) const {
  if (times.empty() || particle >= particles())
    throw ArgumentError("trajectory table: missing trajectory");
  if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
    throw ArgumentError("trajectory table does not cover time " +
                        format_double(t));
  if (t <= times.front()) {
    x = x_lift.front()[particle];
    v_out = v.front()[particle];
    return;
  }
  if (t >= times.back()) {
    x = x_lift.back()[particle];
    v_out = v.back()[particle];
    return;
  }
  std::size_t hi = std::upper_bound(times.begin(), times.end(), t) - times.begin();
  std::size_t lo = hi - 1;
  double th = (t - times[lo]) / (times[hi] - times[lo]);
  x = (1.0 - th) * x_lift[lo][particle] + th * x_lift[hi][particle];
  v_out = (1.0 - th) * v[lo][particle] + th * v[hi][particle];
}

TrajectoryTable free_flow_table(const ParticleEnsemble& e,
                                const std::vector<double>& times) {
  e.validate();
  if (e.dim != 1)
    throw ArgumentError("free_flow_table: 1D ensembles only");
  if (times.empty()) throw ArgumentError("free_flow_table: empty time list");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]))
      throw ArgumentError("free_flow_table: times must increase");
  TrajectoryTable tab;
  tab.times = times;
  tab.x_lift.resize(times.size());
  tab.v.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    tab.x_lift[k].resize(e.size());
    tab.v[k].resize(e.size());
    for (std::size_t s = 0; s < e.size(); ++s) {
      tab.x_lift[k][s] = e.x[s][0] + times[k] * e.v[s][0];
      tab.v[k][s] = e.v[s][0];
    }
  }
  return tab;
}

double pushforward_cost(const Coupling& pi0, const TrajectoryTable& flow1,
                        const TrajectoryTable& flow2, double t,
                        const CostSpec& cost) {
  cost.validate();
  if (flow1.times.empty() || flow2.times.empty())
    throw ArgumentError("pushforward_cost: empty trajectory table");
  const double t_ref = std::max(flow1.times.front(), flow2.times.front());

  double integral = 0.0, a_moment = 0.0, b_moment = 0.0;
  for (const Coupling::Entry& e : pi0.plan) {
    double x1r, v1r, x2r, v2r;
    flow1.eval(t_ref, static_cast<std::size_t>(e.i), x1r, v1r);
    flow2.eval(t_ref, static_cast<std::size_t>(e.j), x2r, v2r);
    // The pair's lift offset is fixed once, by the minimal image at t_ref.
    double offset = torus_delta(wrap_unit(x1r), wrap_unit(x2r)) - (x1r - x2r);

    double x1, v1, x2, v2;
    flow1.eval(t, static_cast<std::size_t>(e.i), x1, v1);
    flow2.eval(t, static_cast<std::size_t>(e.j), x2, v2);
    double dx = (x1 - x2) + offset;
    double dv = v1 - v2;
    switch (cost.kind) {
      case CostKind::standard:
        integral += e.mass * (cost.p == 1 ? std::abs(dx) + std::abs(dv)
                                          : dx * dx + dv * dv);
        break;
      case CostKind::free_adapted: {
        double da = dx - cost.t * dv;
        integral += e.mass * (cost.p == 1 ? std::abs(da) + std::abs(dv)
                                          : da * da + dv * dv);
        break;
      }
      case CostKind::kinetic:
        a_moment += e.mass * dx * dx;
        b_moment += e.mass * dv * dv;
        break;
    }
  }
  if (cost.kind == CostKind::kinetic) {
    QState qs = kinetic_q_from_moments(a_moment, b_moment, cost.epsilon);
    if (!qs.valid)
      throw DomainError(
          "pushforward_cost: kinetic cost above the smallness ceiling");
    return qs.q;
  }
  return cost.p == 1 ? integral : std::sqrt(integral);
}

QState kinetic_q(const CoupledDisplacements& d, double epsilon) {
  const std::size_t n = d.mass.size();
  if (d.dx.size() != n || d.dv.size() != n || n == 0)
    throw ArgumentError("kinetic_q: displacement arrays must match and be nonempty");
  double a = 0.0, b = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (d.mass[k] < 0.0) throw ArgumentError("kinetic_q: negative mass");
    a += d.mass[k] * d.dx[k] * d.dx[k];
    b += d.mass[k] * d.dv[k] * d.dv[k];
  }
  return kinetic_q_from_moments(a, b, epsilon);
}

QState kinetic_q_from_moments(double a, double b, double epsilon,
                              double q_ceiling) {
  if (a < 0.0 || b < 0.0) throw ArgumentError("kinetic_q: negative moments");
  if (!(epsilon > 0.0)) throw ArgumentError("kinetic_q: epsilon must be positive");
  if (!(q_ceiling > 0.0 && q_ceiling < 1.0))
    throw ArgumentError("kinetic_q: ceiling must lie in (0,1)");
  const double inv2 = 1.0 / (epsilon * epsilon);
  auto lam_of = [&](double q) { return inv2 * std::max(1.0, -std::log(q)); };

  QState out;
  if (a == 0.0 && b == 0.0) {
    out.q = 0.0;
    out.lambda = lam_of(q_ceiling);
    out.valid = true;
    return out;
  }
  if (a == 0.0) {
    if (b >= q_ceiling) return out;  // invalid: no root below the ceiling
    out.q = b;
    out.lambda = lam_of(b);
    out.valid = true;
    return out;
  }
  // G(q) = lam(q) a + b - q is strictly decreasing on (0, 1); a root below
  // the ceiling exists iff G(ceiling) <= 0.
  if (lam_of(q_ceiling) * a + b - q_ceiling > 0.0) return out;

  double lo = std::log(1e-300), hi = std::log(q_ceiling);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double g = inv2 * std::max(1.0, -mid) * a + b - std::exp(mid);
    if (g > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  out.q = std::exp(0.5 * (lo + hi));
  out.lambda = lam_of(out.q);
  out.valid = true;
  return out;
}

double dobrushin_constant(double b, double t) {
  if (b < 0.0 || t < 0.0)
    throw ArgumentError("dobrushin_constant: b and t must be >= 0");
  double g = 1.0 + t;
  double term1 = g * std::exp((2.0 / 3.0) * b * (g * g * g - 1.0));
  double term2 = std::exp((1.0 + 2.0 * b) * t);
  return std::min(term1, term2);
}

double kinetic_loeper_bound(double q0, double epsilon, double a_integral,
                            double c) {
  if (!(q0 > 0.0 && q0 < 1.0))
    throw ArgumentError("kinetic_loeper_bound: q0 must lie in (0,1)");
  if (!(epsilon > 0.0))
    throw ArgumentError("kinetic_loeper_bound: epsilon must be positive");
  if (a_integral < 0.0)
    throw ArgumentError("kinetic_loeper_bound: a_integral must be >= 0");
  if (!(c > 0.0)) throw ArgumentError("kinetic_loeper_bound: c must be positive");
  double r0 = std::sqrt(-std::log(q0));
  double rem = r0 - (c / epsilon) * a_integral;
  if (rem <= 0.0) return 1.0;
  return std::exp(-rem * rem);
}

BudgetResult stability_budget(const std::vector<double>& times,
                              const std::vector<double>& density_sup,
                              double epsilon, double t_final, double kappa) {
  if (times.size() != density_sup.size() || times.size() < 2)
    throw ArgumentError("stability_budget: need >= 2 matched samples");
  if (!(epsilon > 0.0)) throw ArgumentError("stability_budget: epsilon > 0 required");
  if (!(t_final > 0.0)) throw ArgumentError("stability_budget: T > 0 required");
  if (!(kappa > 0.0)) throw ArgumentError("stability_budget: kappa > 0 required");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]))
      throw ArgumentError("stability_budget: times must increase");
  if (times.front() > 1e-12 || times.back() < t_final - 1e-12)
    throw ArgumentError("stability_budget: series does not cover [0, T]");

  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    double t0 = std::max(times[k], 0.0);
    double t1 = std::min(times[k + 1], t_final);
    if (t1 <= t0) continue;
    double span = times[k + 1] - times[k];
    double f0 = density_sup[k] +
                (density_sup[k + 1] - density_sup[k]) * (t0 - times[k]) / span;
    double f1 = density_sup[k] +
                (density_sup[k + 1] - density_sup[k]) * (t1 - times[k]) / span;
    integral += 0.5 * (f0 + f1) * (t1 - t0);
  }
  BudgetResult out;
  out.m = integral / epsilon;
  out.threshold = std::exp(-kappa * out.m * out.m);
  return out;
}

}  // namespace kinlab
