#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "kinlab/errors.hpp"
#include "kinlab/phase_space.hpp"
#include "kinlab/rng.hpp"
#include "kinlab/torus.hpp"
#include "kinlab/transport.hpp"

using namespace kinlab;

namespace {

ParticleEnsemble random_ensemble(int n, int dim, Rng& rng,
                                 bool equal_weights = true) {
  ParticleEnsemble p;
  p.dim = dim;
  p.x.resize(n);
  p.v.assign(n, {0.0, 0.0, 0.0});
  p.w.resize(n);
  double wsum = 0.0;
  for (int i = 0; i < n; ++i) {
    std::array<double, 3> raw{rng.uniform(), rng.uniform(), 0.0};
    p.x[i] = TorusPoint(dim, raw);
    for (int k = 0; k < dim; ++k) p.v[i][k] = rng.uniform(-1.0, 1.0);
    p.w[i] = equal_weights ? 1.0 : rng.uniform(0.2, 1.0);
    wsum += p.w[i];
  }
  for (double& w : p.w) w /= wsum;
  return p;
}

// Independent optimum for equal-weight ensembles: enumerate all n!
// assignments.  Returns the un-rooted transport integral.
double brute_force_integral(const ParticleEnsemble& a,
                            const ParticleEnsemble& b, const CostSpec& spec,
                            double lambda = 1.0) {
  const int n = static_cast<int>(a.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      s += a.w[i] *
           pair_cost(spec, a.x[i], a.v[i], b.x[perm[i]], b.v[perm[i]], a.dim,
                     lambda);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double coupling_integral(const Coupling& c, const ParticleEnsemble& a,
                         const ParticleEnsemble& b, const CostSpec& spec,
                         double lambda = 1.0) {
  double s = 0.0;
  for (const Coupling::Entry& e : c.plan)
    s += e.mass *
         pair_cost(spec, a.x[e.i], a.v[e.i], b.x[e.j], b.v[e.j], a.dim, lambda);
  return s;
}

CoupledDisplacements displacements_of(const Coupling& c,
                                      const ParticleEnsemble& a,
                                      const ParticleEnsemble& b) {
  CoupledDisplacements d;
  for (const Coupling::Entry& e : c.plan) {
    d.mass.push_back(e.mass);
    d.dx.push_back(torus_delta(a.x[e.i][0], b.x[e.j][0]));
    d.dv.push_back(a.v[e.i][0] - b.v[e.j][0]);
  }
  return d;
}
}  // namespace

TEST_CASE("assignment optimum equals exhaustive enumeration") {
  // 200 random instances across sizes, orders, kinds, and dimensions; the
  // enumeration is a fully independent optimizer.
  Rng rng(2026);
  int instances = 0;
  for (int rep = 0; rep < 25; ++rep) {
    for (int dim : {1, 2}) {
      for (int p : {1, 2}) {
        for (int kind = 0; kind < 2; ++kind) {
          const int n = 2 + static_cast<int>(rng.uniform(0.0, 4.999));
          ParticleEnsemble a = random_ensemble(n, dim, rng);
          ParticleEnsemble b = random_ensemble(n, dim, rng);
          CostSpec spec = (kind == 0)
                              ? CostSpec::standard_p(p)
                              : CostSpec::free_adapted(rng.uniform(0.0, 2.0), p);
          OtResult res = exact_discrete_ot(a, b, spec);
          res.coupling.check_marginals(a, b);
          const double bf = brute_force_integral(a, b, spec);
          const double got = (p == 1) ? res.cost : res.cost * res.cost;
          CHECK(got == doctest::Approx(bf).epsilon(1e-12));
          // The reported value is realized by the reported plan.
          const double from_plan = coupling_integral(res.coupling, a, b, spec);
          CHECK(from_plan == doctest::Approx(got).epsilon(1e-12));
          ++instances;
        }
      }
    }
  }
  CHECK(instances == 200);
}

TEST_CASE("transportation optimum matches the expanded assignment") {
  // Weights that are multiples of 1/M reduce to an equal-weight problem on
  // M replicated atoms, solvable by enumeration.
  Rng rng(77);
  const int m_total = 7;
  for (int rep = 0; rep < 20; ++rep) {
    const int na = 2 + rep % 3, nb = 2 + (rep + 1) % 3;
    auto split = [&](int parts) {
      std::vector<int> k(parts, 1);
      for (int extra = parts; extra < m_total; ++extra)
        k[static_cast<int>(rng.uniform(0.0, parts - 1e-12))]++;
      return k;
    };
    std::vector<int> ka = split(na), kb = split(nb);
    ParticleEnsemble a = random_ensemble(na, 1, rng);
    ParticleEnsemble b = random_ensemble(nb, 1, rng);
    for (int i = 0; i < na; ++i) a.w[i] = ka[i] / static_cast<double>(m_total);
    for (int j = 0; j < nb; ++j) b.w[j] = kb[j] / static_cast<double>(m_total);

    ParticleEnsemble ea, eb;
    ea.dim = eb.dim = 1;
    for (int i = 0; i < na; ++i)
      for (int r = 0; r < ka[i]; ++r) {
        ea.x.push_back(a.x[i]);
        ea.v.push_back(a.v[i]);
        ea.w.push_back(1.0 / m_total);
      }
    for (int j = 0; j < nb; ++j)
      for (int r = 0; r < kb[j]; ++r) {
        eb.x.push_back(b.x[j]);
        eb.v.push_back(b.v[j]);
        eb.w.push_back(1.0 / m_total);
      }

    CostSpec spec = CostSpec::standard_p(2);
    OtResult res = exact_discrete_ot(a, b, spec);
    res.coupling.check_marginals(a, b);
    const double bf = brute_force_integral(ea, eb, spec);
    CHECK(res.cost * res.cost == doctest::Approx(bf).epsilon(1e-11));
  }
}

TEST_CASE("transport distances satisfy the metric axioms") {
  Rng rng(31);
  for (int p : {1, 2}) {
    CostSpec spec = CostSpec::standard_p(p);
    for (int rep = 0; rep < 15; ++rep) {
      ParticleEnsemble a = random_ensemble(5, 1, rng);
      ParticleEnsemble b = random_ensemble(5, 1, rng);
      ParticleEnsemble c = random_ensemble(5, 1, rng);
      CHECK(exact_discrete_ot(a, a, spec).cost <= 1e-14);
      const double ab = exact_discrete_ot(a, b, spec).cost;
      const double ba = exact_discrete_ot(b, a, spec).cost;
      const double bc = exact_discrete_ot(b, c, spec).cost;
      const double ac = exact_discrete_ot(a, c, spec).cost;
      CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
      CHECK(ac <= ab + bc + 1e-9);
    }
  }
}

TEST_CASE("1d W1 on grids reproduces the single-mode closed form") {
  // mu = 1 + eta cos(2 pi k x) vs nu = 1: W1 = eta / (pi^2 k) on both the
  // line and the torus (the optimal torus shift is zero by symmetry).
  const int nx = 4096;
  const double eta = 0.5;
  for (int k : {1, 2, 8}) {
    std::vector<double> mu(nx), nu(nx, 1.0);
    for (int i = 0; i < nx; ++i)
      mu[i] = 1.0 + eta * std::cos(2.0 * M_PI * k * (i + 0.5) / nx);
    const double expect = eta / (M_PI * M_PI * k);
    CHECK(w1_1d(mu, nu, Space::line) == doctest::Approx(expect).epsilon(1e-4));
    CHECK(w1_1d(mu, nu, Space::torus) == doctest::Approx(expect).epsilon(1e-4));
  }
  std::vector<double> heavy(nx, 1.0);
  heavy[0] += 1.0;
  CHECK_THROWS_AS(w1_1d(heavy, std::vector<double>(nx, 1.0), Space::line),
                  ArgumentError);
}

TEST_CASE("1d W1 on atoms matches hand values and respects wrap-around") {
  using Atoms = std::vector<std::pair<double, double>>;
  Atoms from = {{0.9, 1.0}};
  Atoms to = {{0.1, 1.0}};
  CHECK(w1_1d(from, to, Space::line) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(w1_1d(from, to, Space::torus) == doctest::Approx(0.2).epsilon(1e-14));

  Atoms mu = {{0.2, 0.3}, {0.6, 0.7}};
  Atoms nu = {{0.5, 1.0}};
  CHECK(w1_1d(mu, nu, Space::line) == doctest::Approx(0.16).epsilon(1e-14));

  CHECK_THROWS_AS(w1_1d(Atoms{}, nu, Space::line), ArgumentError);
  CHECK_THROWS_AS(w1_1d(Atoms{{0.2, 0.5}}, nu, Space::torus), ArgumentError);
}

TEST_CASE("1d W1 agrees between the atom solver and the plan solver") {
  Rng rng(4242);
  ParticleEnsemble a, b;
  a.dim = b.dim = 1;
  std::vector<std::pair<double, double>> atoms_a, atoms_b;
  const int n = 40;
  for (int i = 0; i < n; ++i) {
    const double xa = rng.uniform(0.3, 0.7), xb = rng.uniform(0.3, 0.7);
    a.x.push_back(TorusPoint(xa));
    b.x.push_back(TorusPoint(xb));
    a.v.push_back({0.0, 0.0, 0.0});
    b.v.push_back({0.0, 0.0, 0.0});
    a.w.push_back(1.0 / n);
    b.w.push_back(1.0 / n);
    atoms_a.emplace_back(xa, 1.0 / n);
    atoms_b.emplace_back(xb, 1.0 / n);
  }
  const double direct = w1_1d(atoms_a, atoms_b, Space::line);
  const double wrapped = w1_1d(atoms_a, atoms_b, Space::torus);
  const double via_plan =
      exact_discrete_ot(a, b, CostSpec::standard_p(1)).cost;
  CHECK(direct == doctest::Approx(via_plan).epsilon(1e-10));
  CHECK(wrapped == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("pair costs against frozen hand values") {
  TorusPoint xa(0.8), xb(0.1);
  std::array<double, 3> va{0.7, 0.0, 0.0}, vb{0.2, 0.0, 0.0};
  CHECK(pair_cost(CostSpec::standard_p(2), xa, va, xb, vb, 1) ==
        doctest::Approx(0.34).epsilon(1e-14));
  CHECK(pair_cost(CostSpec::standard_p(1), xa, va, xb, vb, 1) ==
        doctest::Approx(0.8).epsilon(1e-14));
  // d_T(x - t v, y - t w)^2 + |dv|^2: the free-flowed images 0.45 and 0.0
  // are 0.45 apart on the torus, and dv = 0.5.
  CHECK(pair_cost(CostSpec::free_adapted(0.5), xa, va, xb, vb, 1) ==
        doctest::Approx(0.45 * 0.45 + 0.25).epsilon(1e-14));
  // lambda dx^2 + dv^2 with lambda = 3.
  CHECK(pair_cost(CostSpec::kinetic(0.1), xa, va, xb, vb, 1, 3.0) ==
        doctest::Approx(3.0 * 0.09 + 0.25).epsilon(1e-14));

  TorusPoint ya(2, {0.9, 0.2, 0.0}), yb(2, {0.1, 0.3, 0.0});
  std::array<double, 3> wa{0.5, -0.5, 0.0}, wb{0.1, -0.1, 0.0};
  // dx = (-0.2, -0.1), dv = (0.4, -0.4).
  CHECK(pair_cost(CostSpec::standard_p(2), ya, wa, yb, wb, 2) ==
        doctest::Approx(0.04 + 0.01 + 0.16 + 0.16).epsilon(1e-13));

  CHECK_THROWS_AS(CostSpec::standard_p(3).validate(), ArgumentError);
  CHECK_THROWS_AS(CostSpec::free_adapted(-1.0).validate(), ArgumentError);
  CHECK_THROWS_AS(CostSpec::kinetic(0.0).validate(), ArgumentError);
}

TEST_CASE("implicit kinetic cost agrees with direct scalar root finding") {
  // Independent oracle: bisect G(q) = eps^-2 max(1, -log q) a + b - q in
  // plain q space.
  auto oracle = [](double a, double b, double eps) {
    const double ceiling = 0.36787944117144233;
    const double inv2 = 1.0 / (eps * eps);
    auto g = [&](double q) {
      return inv2 * std::max(1.0, -std::log(q)) * a + b - q;
    };
    QState out;
    if (g(ceiling) > 0.0) return out;  // no root below the ceiling
    double lo = 1e-300, hi = ceiling;
    for (int it = 0; it < 300; ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) > 0.0 ? lo : hi) = mid;
    }
    out.q = 0.5 * (lo + hi);
    out.lambda = inv2 * std::max(1.0, -std::log(out.q));
    out.valid = true;
    return out;
  };

  Rng rng(9);
  int checked = 0, invalid = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const double eps = (rep % 3 == 0) ? 0.05 : (rep % 3 == 1 ? 0.1 : 0.3);
    const double a = std::pow(10.0, rng.uniform(-7.0, -2.0));
    const double b = (rep % 4 == 0) ? 0.0 : std::pow(10.0, rng.uniform(-6.0, -1.0));
    QState got = kinetic_q_from_moments(a, b, eps);
    QState ref = oracle(a, b, eps);
    CHECK(got.valid == ref.valid);
    if (got.valid && ref.valid) {
      CHECK(got.q == doctest::Approx(ref.q).epsilon(1e-10));
      CHECK(got.lambda == doctest::Approx(ref.lambda).epsilon(1e-10));
      // The fixed-point equation holds at the reported root.
      CHECK(got.lambda * a + b == doctest::Approx(got.q).epsilon(1e-10));
      ++checked;
    } else {
      ++invalid;
    }
  }
  CHECK(checked >= 30);  // both branches are exercised
  CHECK(invalid >= 1);

  QState zero = kinetic_q_from_moments(0.0, 0.0, 0.1);
  CHECK(zero.valid);
  CHECK(zero.q == 0.0);
  QState pure_v = kinetic_q_from_moments(0.0, 0.05, 0.1);
  CHECK(pure_v.valid);
  CHECK(pure_v.q == doctest::Approx(0.05).epsilon(1e-15));
  CHECK_FALSE(kinetic_q_from_moments(0.0, 0.5, 0.1).valid);
  CHECK_FALSE(kinetic_q_from_moments(1.0, 0.0, 0.01).valid);
  CHECK_THROWS_AS(kinetic_q_from_moments(-1.0, 0.0, 0.1), ArgumentError);
  CHECK_THROWS_AS(kinetic_q_from_moments(0.1, 0.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(kinetic_q_from_moments(0.1, 0.0, 0.1, 1.5), ArgumentError);

  // Growing position spread eventually pushes the root past the ceiling.
  bool seen_valid = false, seen_invalid = false;
  double prev_q = 0.0;
  for (double a = 1e-6; a < 1e-1; a *= 2.0) {
    QState s = kinetic_q_from_moments(a, 1e-3, 0.1);
    if (s.valid) {
      CHECK(s.q > prev_q);  // monotone in the position moment
      prev_q = s.q;
      CHECK_FALSE(seen_invalid);  // validity is monotone too
      seen_valid = true;
    } else {
      seen_invalid = true;
    }
  }
  CHECK(seen_valid);
  CHECK(seen_invalid);
}

TEST_CASE("displacement form of the kinetic cost matches the moment form") {
  Rng rng(13);
  CoupledDisplacements d;
  double a = 0.0, b = 0.0;
  for (int i = 0; i < 12; ++i) {
    const double m = 1.0 / 12, dx = rng.uniform(-0.02, 0.02),
                 dv = rng.uniform(-0.05, 0.05);
    d.mass.push_back(m);
    d.dx.push_back(dx);
    d.dv.push_back(dv);
    a += m * dx * dx;
    b += m * dv * dv;
  }
  QState s1 = kinetic_q(d, 0.1);
  QState s2 = kinetic_q_from_moments(a, b, 0.1);
  CHECK(s1.valid);
  CHECK(s1.q == doctest::Approx(s2.q).epsilon(1e-13));

  CoupledDisplacements bad = d;
  bad.mass[0] = -0.1;
  CHECK_THROWS_AS(kinetic_q(bad, 0.1), ArgumentError);
  bad = d;
  bad.dx.pop_back();
  CHECK_THROWS_AS(kinetic_q(bad, 0.1), ArgumentError);
}

TEST_CASE("kinetic optimal coupling is self-consistent and optimal") {
  Rng rng(55);
  ParticleEnsemble a, b;
  a.dim = b.dim = 1;
  const int n = 6;
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform();
    a.x.push_back(TorusPoint(x));
    b.x.push_back(TorusPoint(x + rng.uniform(-0.01, 0.01)));
    a.v.push_back({rng.uniform(-0.3, 0.3), 0.0, 0.0});
    b.v.push_back({a.v.back()[0] + rng.uniform(-0.05, 0.05), 0.0, 0.0});
    a.w.push_back(1.0 / n);
    b.w.push_back(1.0 / n);
  }
  const double eps = 0.1;
  OtResult res = exact_discrete_ot(a, b, CostSpec::kinetic(eps));
  res.coupling.check_marginals(a, b);
  QState re = kinetic_q(displacements_of(res.coupling, a, b), eps);
  REQUIRE(re.valid);
  CHECK(re.q == doctest::Approx(res.cost).epsilon(1e-10));

  // No permutation coupling does better.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int better = 0;
  do {
    Coupling c;
    for (int i = 0; i < n; ++i) c.plan.push_back({i, perm[i], 1.0 / n});
    QState q = kinetic_q(displacements_of(c, a, b), eps);
    if (q.valid && q.q < res.cost - 1e-12) ++better;
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(better == 0);

  // Far-apart data with tiny eps has no admissible value.
  ParticleEnsemble far = b;
  for (int i = 0; i < n; ++i) far.x[i] = TorusPoint(a.x[i][0] + 0.5);
  CHECK_THROWS_AS(exact_discrete_ot(a, far, CostSpec::kinetic(0.01)),
                  DomainError);
}

TEST_CASE("adapted distance at t = 0 reduces to the standard distance") {
  Rng rng(21);
  ParticleEnsemble a = random_ensemble(8, 1, rng);
  ParticleEnsemble b = random_ensemble(8, 1, rng);
  const double d0 = adapted_distance(a, b, 0.0);
  const double ds = exact_discrete_ot(a, b, CostSpec::standard_p(2)).cost;
  CHECK(d0 == doctest::Approx(ds).epsilon(1e-12));
  CHECK_THROWS_AS(adapted_distance(a, b, -0.5), ArgumentError);
}

TEST_CASE("pushforward along free flows keeps the adapted cost constant") {
  Rng rng(87);
  ParticleEnsemble a = random_ensemble(10, 1, rng);
  ParticleEnsemble b = random_ensemble(10, 1, rng);
  OtResult base = exact_discrete_ot(a, b, CostSpec::standard_p(2));
  std::vector<double> times;
  for (int k = 0; k <= 10; ++k) times.push_back(0.3 * k);
  TrajectoryTable fa = free_flow_table(a, times);
  TrajectoryTable fb = free_flow_table(b, times);
  const double at0 =
      pushforward_cost(base.coupling, fa, fb, 0.0, CostSpec::free_adapted(0.0));
  for (double t : {0.3, 1.5, 3.0}) {
    const double val =
        pushforward_cost(base.coupling, fa, fb, t, CostSpec::free_adapted(t));
    CHECK(val == doctest::Approx(at0).epsilon(1e-12));
  }
  // Outside the sampled window the table refuses to extrapolate.
  CHECK_THROWS_AS(
      pushforward_cost(base.coupling, fa, fb, 3.5, CostSpec::free_adapted(3.5)),
      ArgumentError);

  // Table sanity: lifts are exactly x0 + t v and interpolation is exact at
  // stored times.
  double x = 0.0, v = 0.0;
  fa.eval(0.6, 3, x, v);
  CHECK(x == doctest::Approx(a.x[3][0] + 0.6 * a.v[3][0]).epsilon(1e-14));
  CHECK(v == a.v[3][0]);
}

TEST_CASE("contraction constant spot values") {
  CHECK(dobrushin_constant(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dobrushin_constant(0.5, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  // b = 0: min{1 + t, e^t} = 1 + t... except e^t < 1 + t never; at t = 1 the
  // first branch wins.
  CHECK(dobrushin_constant(0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  // b = 1, t = 1: min{2 e^{14/3}, e^3} = e^3.
  CHECK(dobrushin_constant(1.0, 1.0) ==
        doctest::Approx(std::exp(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(dobrushin_constant(-0.1, 1.0), ArgumentError);
  CHECK_THROWS_AS(dobrushin_constant(0.1, -1.0), ArgumentError);
}

TEST_CASE("stability envelope: edge cases and exact constant-rate value") {
  // exp(-((sqrt|log q0| - (C/eps) IA)_+)^2): at IA = 0 it returns q0, grows
  // monotonically with IA, and saturates at 1.
  const double q0 = 1e-4;
  CHECK(kinetic_loeper_bound(q0, 0.1, 0.0, 1.0) ==
        doctest::Approx(q0).epsilon(1e-12));
  double prev = 0.0;
  for (double ia : {0.0, 0.01, 0.05, 0.1, 0.2}) {
    const double v = kinetic_loeper_bound(q0, 0.5, ia, 1.0);
    CHECK(v >= prev);
    prev = v;
  }
  const double sat = std::sqrt(-std::log(q0));
  CHECK(kinetic_loeper_bound(q0, 1.0, 2.0 * sat, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(kinetic_loeper_bound(0.0, 0.1, 0.1, 1.0), ArgumentError);
  CHECK_THROWS_AS(kinetic_loeper_bound(1.5, 0.1, 0.1, 1.0), ArgumentError);
  CHECK_THROWS_AS(kinetic_loeper_bound(q0, -0.1, 0.1, 1.0), ArgumentError);

  // Constant density sup A = 2 over [0, 1] at eps = 0.5: M = 4.
  std::vector<double> times = {0.0, 0.25, 0.5, 1.0};
  std::vector<double> sup(times.size(), 2.0);
  BudgetResult br = stability_budget(times, sup, 0.5, 1.0, 1.0);
  CHECK(br.m == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(br.threshold == doctest::Approx(std::exp(-16.0)).epsilon(1e-12));
  BudgetResult half = stability_budget(times, sup, 0.5, 1.0, 0.5);
  CHECK(half.threshold == doctest::Approx(std::exp(-8.0)).epsilon(1e-12));
  // The sample window must cover [0, t_final].
  CHECK_THROWS_AS(stability_budget({0.0, 0.4}, {2.0, 2.0}, 0.5, 1.0, 1.0),
                  ArgumentError);
  CHECK_THROWS_AS(stability_budget({0.0}, {2.0}, 0.5, 1.0, 1.0), ArgumentError);
}

TEST_CASE("marginal verification catches corrupted plans") {
  Rng rng(3);
  ParticleEnsemble a = random_ensemble(6, 1, rng);
  ParticleEnsemble b = random_ensemble(6, 1, rng);
  OtResult res = exact_discrete_ot(a, b, CostSpec::standard_p(2));
  Coupling good = res.coupling;
  CHECK_NOTHROW(good.check_marginals(a, b));
  Coupling bad = good;
  bad.plan[0].mass += 1e-6;
  CHECK_THROWS_AS(bad.check_marginals(a, b), ArgumentError);
  bad = good;
  bad.plan[0].j = 99;
  CHECK_THROWS_AS(bad.check_marginals(a, b), ArgumentError);
}

TEST_CASE("size caps reject oversized exact solves") {
  Rng rng(8);
  ParticleEnsemble a = random_ensemble(6, 1, rng);
  ParticleEnsemble b = random_ensemble(6, 1, rng);
  CHECK_THROWS_AS(exact_discrete_ot(a, b, CostSpec::standard_p(2), 4, 500),
                  SizeError);
  ParticleEnsemble c = random_ensemble(6, 1, rng, false);  // unequal weights
  CHECK_THROWS_AS(exact_discrete_ot(a, c, CostSpec::standard_p(2), 2000, 4),
                  SizeError);
  try {
    exact_discrete_ot(a, b, CostSpec::standard_p(2), 4, 500);
  } catch (const SizeError& e) {
    CHECK(std::string(e.what()).find("subsampl") != std::string::npos);
  }
}
