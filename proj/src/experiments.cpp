#include "kinlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kinlab/dynamics.hpp"
#include "kinlab/errors.hpp"
#include "kinlab/fields.hpp"
#include "kinlab/rng.hpp"
#include "kinlab/transport.hpp"

namespace kinlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;

void add_verdict(ExperimentReport& r, const std::string& name, double measured,
                 double tolerance, bool pass) {
  r.verdicts.push_back({name, measured, tolerance, pass});
}

void add_metric(ExperimentReport& r, const std::string& name, double value) {
  r.metrics.emplace_back(name, value);
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n)
    throw ArgumentError("slope fit needs at least two matching points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw ArgumentError("slope fit needs distinct abscissae");
  return sxy / sxx;
}

// Largest ratio metric[next]/metric[prev] along decreasing epsilon; a value
// < 1 certifies a strictly decreasing trend.
double max_adjacent_ratio(std::vector<double> eps, std::vector<double> metric) {
  std::vector<std::size_t> idx(eps.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return eps[a] > eps[b]; });
  double worst = 0.0;
  for (std::size_t s = 1; s < idx.size(); ++s) {
    const double prev = metric[idx[s - 1]];
    const double next = metric[idx[s]];
    if (prev <= 0.0) return next > 0.0 ? std::numeric_limits<double>::infinity()
                                       : 1.0;
    worst = std::max(worst, next / prev);
  }
  return worst;
}

// Sliding one-period trapezoid average of the recorded rows; returns the
// worst (over window positions) sup-norm deviation from `reference`, or from
// the window's own spatial mean when `about_own_mean` is set.
double sliding_window_defect(const std::vector<std::vector<double>>& rows,
                             int window, bool about_own_mean,
                             double reference) {
  const int last = static_cast<int>(rows.size()) - 1;
  if (window < 1 || window > last)
    throw ArgumentError("window must fit inside the recorded horizon");
  const std::size_t nx = rows[0].size();
  std::vector<double> avg(nx);
  double worst = 0.0;
  for (int s = 0; s + window <= last; ++s) {
    for (std::size_t i = 0; i < nx; ++i) {
      double sum = 0.0;
      for (int k = s; k <= s + window; ++k) sum += rows[k][i];
      sum -= 0.5 * (rows[s][i] + rows[s + window][i]);
      avg[i] = sum / window;
    }
    double ref = reference;
    if (about_own_mean) {
      ref = 0.0;
      for (double a : avg) ref += a;
      ref /= static_cast<double>(nx);
    }
    for (double a : avg) worst = std::max(worst, std::abs(a - ref));
  }
  return worst;
}

double sup_abs_deviation(const std::vector<double>& v, double ref) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x - ref));
  return m;
}

double spatial_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// ---------------------------------------------------------------------------
// E1: free transport is an isometry for the adapted cost.

ExperimentReport e1_free_isometry(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.columns = {"t", "adapted_w2", "standard_w2"};

  const std::size_t n = static_cast<std::size_t>(cfg.n_particles);
  Rng rng(cfg.seed);
  ParticleEnsemble a, b;
  a.dim = b.dim = 1;
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t s = 0; s < n; ++s) {
    a.x.emplace_back(wrap_unit(0.5 + 0.05 * rng.normal()));
    a.v.push_back({0.05 + 0.02 * rng.normal(), 0.0, 0.0});
    a.w.push_back(w);
  }
  for (std::size_t s = 0; s < n; ++s) {
    b.x.emplace_back(wrap_unit(0.5 + 0.05 * rng.normal()));
    b.v.push_back({-0.05 + 0.02 * rng.normal(), 0.0, 0.0});
    b.w.push_back(w);
  }

  const int samples = 10;
  std::vector<double> adapted, standard;
  for (int s = 0; s <= samples; ++s) {
    const double t = cfg.t_final * s / samples;
    ParticleEnsemble at = free_flow(a, t);
    ParticleEnsemble bt = free_flow(b, t);
    adapted.push_back(adapted_distance(at, bt, t, 2));
    standard.push_back(
        exact_discrete_ot(at, bt, CostSpec::standard_p(2)).cost);
    r.rows.push_back({t, adapted.back(), standard.back()});
  }

  const double ad_min = *std::min_element(adapted.begin(), adapted.end());
  const double ad_max = *std::max_element(adapted.begin(), adapted.end());
  const double rel_var = (ad_max - ad_min) / adapted.front();
  const double growth =
      *std::max_element(standard.begin(), standard.end()) / standard.front();

  add_verdict(r, "adapted_distance_constant", rel_var, 1e-9, rel_var < 1e-9);
  add_verdict(r, "standard_w2_growth", growth, 2.0, growth > 2.0);
  add_metric(r, "adapted_rel_variation", rel_var);
  add_metric(r, "standard_growth_factor", growth);
  return r;
}

// ---------------------------------------------------------------------------
// E2: oscillatory densities rho_k = 1 + eta sin(2 pi k x).

ExperimentReport e2_oscillation(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.columns = {"k", "l1", "w1"};

  const int nx = cfg.nx;
  const double dx = 1.0 / nx;
  const std::vector<double> ones(static_cast<std::size_t>(nx), 1.0);
  const double l1_exact = 2.0 * cfg.eta / kPi;

  std::vector<double> log_k, log_w1, w1_values;
  double l1_defect = 0.0;
  for (int k : cfg.k) {
    std::vector<double> rho(static_cast<std::size_t>(nx));
    double l1 = 0.0;
    for (int i = 0; i < nx; ++i) {
      const double x = (i + 0.5) * dx;
      rho[static_cast<std::size_t>(i)] = 1.0 + cfg.eta * std::sin(kTwoPi * k * x);
      l1 += std::abs(rho[static_cast<std::size_t>(i)] - 1.0) * dx;
    }
    const double w1 = w1_1d(rho, ones, Space::torus);
    r.rows.push_back({static_cast<double>(k), l1, w1});
    l1_defect = std::max(l1_defect, std::abs(l1 - l1_exact));
    w1_values.push_back(w1);
    if (w1 > 0.0) {
      log_k.push_back(std::log(static_cast<double>(k)));
      log_w1.push_back(std::log(w1));
    }
  }

  add_verdict(r, "l1_defect", l1_defect, 1e-6, l1_defect <= 1e-6);
  add_metric(r, "l1_defect_max", l1_defect);
  if (cfg.k.size() >= 2 && log_k.size() == cfg.k.size()) {
    const double slope = fit_slope(log_k, log_w1);
    add_verdict(r, "w1_slope", slope, 0.05, std::abs(slope + 1.0) <= 0.05);
    add_metric(r, "w1_slope", slope);
  }
  if (cfg.k.size() == 1) add_metric(r, "w1", w1_values.front());
  return r;
}

// ---------------------------------------------------------------------------
// E3: Dobrushin growth envelope for smooth-kernel mean-field flows.

ExperimentReport e3_dobrushin(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.columns = {"t", "b", "w1_0", "w1", "c_b", "ratio"};

  const std::size_t n = static_cast<std::size_t>(cfg.n_particles);
  const double weight = 1.0 / static_cast<double>(n);
  const int samples = 50;
  const double dt_req = cfg.dt > 0.0 ? cfg.dt : 0.01;
  const int steps_per =
      std::max(1, static_cast<int>(std::llround(cfg.t_final / (samples * dt_req))));
  const double dt = cfg.t_final / (samples * steps_per);

  Rng rng(cfg.seed);
  ParticleEnsemble base;
  base.dim = 1;
  for (std::size_t s = 0; s < n; ++s) {
    base.x.emplace_back(rng.uniform());
    base.v.push_back({0.3 * rng.normal(), 0.0, 0.0});
    base.w.push_back(weight);
  }

  const std::vector<double> targets = {1e-2, 1e-3};
  auto w1_standard = [](const ParticleEnsemble& p, const ParticleEnsemble& q) {
    return exact_discrete_ot(p, q, CostSpec::standard_p(1)).cost;
  };

  double max_ratio = 0.0;
  double max_drift = 0.0;
  double max_cal_err = 0.0;

  for (double target : targets) {
    // Per-pair perturbation directions, half in x and half in v.
    std::vector<double> sx(n), sv(n);
    for (std::size_t s = 0; s < n; ++s) {
      sx[s] = rng.uniform(-1.0, 1.0);
      sv[s] = rng.uniform(-1.0, 1.0);
    }
    auto perturb = [&](double delta) {
      ParticleEnsemble out = base;
      for (std::size_t s = 0; s < n; ++s) {
        out.x[s] = TorusPoint(wrap_unit(base.x[s][0] + 0.5 * delta * sx[s]));
        out.v[s][0] = base.v[s][0] + 0.5 * delta * sv[s];
      }
      return out;
    };

    // Calibrate the perturbation scale so the measured distance hits the
    // target; re-pairing in the optimal plan makes this slightly nonlinear.
    double delta = 2.0 * target;
    ParticleEnsemble pert = perturb(delta);
    double w1_0 = w1_standard(base, pert);
    for (int it = 0; it < 3 && std::abs(w1_0 - target) > 0.05 * target; ++it) {
      delta *= target / w1_0;
      pert = perturb(delta);
      w1_0 = w1_standard(base, pert);
    }
    max_cal_err = std::max(max_cal_err, std::abs(w1_0 - target) / target);

    std::vector<double> times(samples + 1);
    for (int s = 0; s <= samples; ++s) times[s] = cfg.t_final * s / samples;

    // Kernel-free control: the pushforward functional along free flow.
    {
      Coupling pi0 = exact_discrete_ot(base, pert, CostSpec::standard_p(1)).coupling;
      TrajectoryTable ta = free_flow_table(base, times);
      TrajectoryTable tb = free_flow_table(pert, times);
      const double q0 =
          pushforward_cost(pi0, ta, tb, 0.0, CostSpec::free_adapted(0.0, 1));
      for (int s = 0; s <= samples; ++s) {
        const double q = pushforward_cost(pi0, ta, tb, times[s],
                                          CostSpec::free_adapted(times[s], 1));
        max_drift = std::max(max_drift, std::abs(q - q0));
        r.rows.push_back({times[s], 0.0, q0, q, 1.0, q / q0});
      }
    }

    for (double bb : cfg.b) {
      const std::vector<SineKernel> kernel = {{bb, 1}};
      ParticleEnsemble ea = base, eb = pert;
      r.rows.push_back({0.0, bb, w1_0, w1_0, 1.0, 1.0});
      for (int s = 1; s <= samples; ++s) {
        ea = advance_mean_field(ea, kernel, dt, steps_per);
        eb = advance_mean_field(eb, kernel, dt, steps_per);
        const double w1 = w1_standard(ea, eb);
        const double cb = dobrushin_constant(bb, times[s]);
        const double ratio = w1 / (cb * w1_0);
        max_ratio = std::max(max_ratio, ratio);
        r.rows.push_back({times[s], bb, w1_0, w1, cb, ratio});
      }
    }
  }

  add_verdict(r, "dobrushin_bound", max_ratio, 1.0, max_ratio <= 1.0);
  add_verdict(r, "q_pushforward_constant", max_drift, 1e-9, max_drift <= 1e-9);
  add_verdict(r, "w1_0_calibration", max_cal_err, 0.1, max_cal_err <= 0.1);
  add_metric(r, "dobrushin_max_ratio", max_ratio);
  add_metric(r, "q_max_drift", max_drift);
  return r;
}

// ---------------------------------------------------------------------------
// E4: kinetic log-Lipschitz rate and its integrated bound along a coupled
// characteristic family.

ExperimentReport e4_kinetic_loeper(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.columns = {"t", "q", "a_sup", "q_dot", "rate_rhs", "bound", "fp_residual"};

  const double eps = cfg.epsilon.front();
  const double sigma = 0.2, amp = 0.02, x_shift = 1e-5, v_shift = 1e-5;
  const PhaseGrid grid(cfg.nx, cfg.nv, cfg.v_max);
  const double dt = cfg.dt > 0.0 ? cfg.dt : auto_time_step(eps);
  const int steps = static_cast<int>(std::ceil(cfg.t_final / dt - 1e-9));
  const double t_end = steps * dt;

  GriddedDistribution f1 = cosine_maxwellian(grid, amp, 1, sigma);
  GriddedDistribution f2 = cosine_maxwellian(grid, amp, 1, sigma, x_shift, v_shift);
  RunRecord rec1, rec2;
  advance_vp(f1, eps, dt, steps, &rec1);
  advance_vp(f2, eps, dt, steps, &rec2);
  SampledFieldHistory h1(rec1.times, rec1.e_field);
  SampledFieldHistory h2(rec2.times, rec2.e_field);

  // Coupled pairs sampled from the smooth data; the partner is the exact
  // shift image, so the initial coupling is a transported map.
  const std::size_t n = static_cast<std::size_t>(cfg.n_particles);
  const double w = 1.0 / static_cast<double>(n);
  Rng rng(cfg.seed);
  auto sample_x = [&](double u) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double cdf = mid + amp * std::sin(kTwoPi * mid) / kTwoPi;
      (cdf < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  const int m = steps + 1;
  std::vector<double> mom_a(m, 0.0), mom_b(m, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const double x = sample_x(rng.uniform());
    const double v = sigma * rng.normal();
    CharacteristicPair cp =
        integrate_pair(h1, h2, {x, v}, {x + x_shift, v + v_shift}, dt, steps);
    for (int k = 0; k < m; ++k) {
      const double dX = cp.r[k] + cp.t[k] * cp.dv[k];
      mom_a[k] += w * dX * dX;
      mom_b[k] += w * cp.dv[k] * cp.dv[k];
    }
  }

  std::vector<double> q(m), fp_res(m), a_sup(m), ia(m, 0.0);
  for (int k = 0; k < m; ++k) {
    const QState qs = kinetic_q_from_moments(mom_a[k], mom_b[k], eps);
    if (!qs.valid)
      throw DomainError("kinetic cost left the admissible range at t = " +
                        std::to_string(k * dt));
    q[k] = qs.q;
    fp_res[k] = std::abs(qs.lambda * mom_a[k] + mom_b[k] - qs.q);
    a_sup[k] = *std::max_element(rec1.rho[k].begin(), rec1.rho[k].end()) +
               *std::max_element(rec2.rho[k].begin(), rec2.rho[k].end());
    if (k > 0) ia[k] = ia[k - 1] + 0.5 * dt * (a_sup[k - 1] + a_sup[k]);
  }

  std::vector<double> qdot(m, 0.0), rhs_base(m, 0.0);
  for (int k = 0; k < m; ++k)
    rhs_base[k] = (a_sup[k] / eps) * q[k] * std::sqrt(std::max(0.0, -std::log(q[k])));
  for (int k = 1; k + 1 < m; ++k)
    qdot[k] = (q[k + 1] - q[k - 1]) / (2.0 * dt);

  // Fit the constant on the first quarter: the larger of the differential
  // ratio and the smallest constant making the integrated bound hold there.
  const double quarter = 0.25 * t_end;
  const double r0 = std::sqrt(-std::log(q[0]));
  double c_fit = 1e-12;
  for (int k = 1; k + 1 < m; ++k) {
    if (rec1.times[k] > quarter) break;
    if (qdot[k] > 0.0 && rhs_base[k] > 0.0)
      c_fit = std::max(c_fit, qdot[k] / rhs_base[k]);
  }
  for (int k = 1; k < m; ++k) {
    if (rec1.times[k] > quarter) break;
    const double rk = std::sqrt(std::max(0.0, -std::log(q[k])));
    if (ia[k] > 0.0 && rk < r0) c_fit = std::max(c_fit, eps * (r0 - rk) / ia[k]);
  }
  const double c = c_fit * (1.0 + 1e-9);

  int held = 0, total = 0;
  for (int k = 1; k + 1 < m; ++k) {
    if (rec1.times[k] <= quarter) continue;
    ++total;
    if (qdot[k] <= c * rhs_base[k]) ++held;
  }
  const double fraction =
      total > 0 ? static_cast<double>(held) / total : 1.0;

  double bound_ratio = 0.0;
  std::vector<double> bound(m);
  bound[0] = q[0];
  for (int k = 1; k < m; ++k) {
    bound[k] = kinetic_loeper_bound(q[0], eps, ia[k], c);
    bound_ratio = std::max(bound_ratio, q[k] / bound[k]);
  }

  const BudgetResult budget =
      stability_budget(rec1.times, a_sup, eps, t_end, cfg.kappa);
  const double m_check =
      std::abs(budget.m - ia[m - 1] / eps) / std::max(1.0, budget.m);

  double res_max = 0.0;
  for (int k = 0; k < m; ++k) {
    res_max = std::max(res_max, fp_res[k]);
    r.rows.push_back({rec1.times[k], q[k], a_sup[k], qdot[k], c * rhs_base[k],
                      bound[k], fp_res[k]});
  }

  add_verdict(r, "loeper_rate_fraction", fraction, 0.95, fraction >= 0.95);
  add_verdict(r, "loeper_integrated_bound", bound_ratio, 1.0 + 1e-9,
              bound_ratio <= 1.0 + 1e-9);
  add_verdict(r, "kinetic_fixed_point_residual", res_max, 1e-10,
              res_max <= 1e-10);
  add_verdict(r, "budget_consistency", m_check, 1e-12, m_check <= 1e-12);
  add_metric(r, "rate_fraction", fraction);
  add_metric(r, "bound_max_ratio", bound_ratio);
  add_metric(r, "fp_residual_max", res_max);
  add_metric(r, "fitted_c", c);
  add_metric(r, "budget_m", budget.m);
  add_metric(r, "budget_threshold", budget.threshold);
  return r;
}

// ---------------------------------------------------------------------------
// E5: quasineutral trend for well-prepared scaled dynamics.

ExperimentReport e5_quasineutral_vp(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.columns = {"t", "epsilon", "rho_sup_defect", "mode1_cos"};
  const double sigma = 0.05;
  const PhaseGrid grid(cfg.nx, cfg.nv, cfg.v_max);

  std::vector<double> defects, period_errs;
  for (double eps : cfg.epsilon) {
    const double dt = cfg.dt > 0.0 ? cfg.dt : auto_time_step(eps);
    const double period = kTwoPi * eps;
    const int window = std::max(1, static_cast<int>(std::llround(period / dt)));
    const double t_run = std::max(cfg.t_final, 5.75 * period);
    int steps = static_cast<int>(std::ceil(t_run / dt - 1e-9));
    steps = std::max(steps, window + 1);

    GriddedDistribution f0 = cosine_maxwellian(grid, eps * eps, 1, sigma);
    RunRecord rec;
    advance_vp(f0, eps, dt, steps, &rec);

    defects.push_back(sliding_window_defect(rec.rho, window, false, 1.0));

    // First-mode cosine amplitude; its zero crossings give the fast period.
    std::vector<double> c1(rec.times.size());
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      double acc = 0.0;
      for (int i = 0; i < cfg.nx; ++i)
        acc += (rec.rho[k][static_cast<std::size_t>(i)] - 1.0) *
               std::cos(kTwoPi * grid.x_center(i));
      c1[k] = 2.0 * acc / cfg.nx;
      r.rows.push_back(
          {rec.times[k], eps, sup_abs_deviation(rec.rho[k], 1.0), c1[k]});
    }
    std::vector<double> crossings;
    for (std::size_t k = 0; k + 1 < c1.size(); ++k) {
      if (c1[k] == 0.0 || c1[k] * c1[k + 1] < 0.0) {
        crossings.push_back(rec.times[k] +
                            dt * c1[k] / (c1[k] - c1[k + 1]));
      }
    }
    if (crossings.size() < 2)
      throw DomainError("no oscillation detected for epsilon = " +
                        std::to_string(eps));
    double gap_sum = 0.0;
    for (std::size_t k = 1; k < crossings.size(); ++k)
      gap_sum += crossings[k] - crossings[k - 1];
    const double fitted = 2.0 * gap_sum / static_cast<double>(crossings.size() - 1);
    period_errs.push_back(std::abs(fitted / period - 1.0));
  }

  const double period_err =
      *std::max_element(period_errs.begin(), period_errs.end());
  add_verdict(r, "plasma_period", period_err, 0.05, period_err <= 0.05);
  if (cfg.epsilon.size() >= 2) {
    const double ratio = max_adjacent_ratio(cfg.epsilon, defects);
    add_verdict(r, "window_defect_decreasing", ratio, 1.0, ratio < 1.0);
    add_metric(r, "defect_ratio_max", ratio);
    add_metric(r, "period_rel_err_max", period_err);
  } else {
    add_metric(r, "window_defect_sup", defects.front());
    add_metric(r, "period_rel_err", period_errs.front());
  }
  return r;
}

// ---------------------------------------------------------------------------
// E6: massless-electron runs against the isothermal Euler reference.

ExperimentReport e6_vpme_isothermal(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.columns = {"t", "epsilon", "l2_rho", "l2_u"};
  const double sigma = 0.03, amp = 0.1, t_cap = 4.0;
  const int n_samples = 25;
  const PhaseGrid grid(cfg.nx, cfg.nv, cfg.v_max);
  const int nx_f = 8 * cfg.nx;
  const double dx_f = 1.0 / nx_f;

  FluidState fluid0;
  fluid0.rho.resize(static_cast<std::size_t>(nx_f));
  fluid0.u.assign(static_cast<std::size_t>(nx_f), 0.0);
  for (int i = 0; i < nx_f; ++i)
    fluid0.rho[static_cast<std::size_t>(i)] =
        1.0 + amp * std::cos(kTwoPi * (i + 0.5) * dx_f);

  auto max_grad = [&](const std::vector<double>& rho) {
    double g = 0.0;
    const int nn = static_cast<int>(rho.size());
    for (int i = 0; i < nn; ++i) {
      const double d = (rho[static_cast<std::size_t>((i + 1) % nn)] -
                        rho[static_cast<std::size_t>((i + nn - 1) % nn)]) /
                       (2.0 * dx_f);
      g = std::max(g, std::abs(d));
    }
    return g;
  };

  // Empirical gradient-steepening time of the fluid reference.
  const double g0 = max_grad(fluid0.rho);
  double t_steepen = t_cap;
  {
    FluidState s = fluid0;
    double t = 0.0;
    const double chunk = 0.01;
    while (t < t_cap) {
      s = advance_fluid(s, chunk);
      t += chunk;
      if (max_grad(s.rho) >= 2.0 * g0) {
        t_steepen = t;
        break;
      }
    }
  }
  const double t_compare = std::min(0.6 * t_steepen, cfg.t_final);

  std::vector<double> distances;
  for (double eps : cfg.epsilon) {
    const double dt = cfg.dt > 0.0 ? cfg.dt : auto_time_step(eps);
    std::vector<int> snap(n_samples + 1, 0);
    for (int s = 1; s <= n_samples; ++s) {
      snap[static_cast<std::size_t>(s)] = std::max(
          {1, static_cast<int>(std::llround(s * t_compare / (n_samples * dt))),
           snap[static_cast<std::size_t>(s - 1)]});
    }

    GriddedDistribution f = cosine_maxwellian(grid, amp, 1, sigma);
    FluidState fluid = fluid0;
    double t_prev = 0.0;
    double d_sum = 0.0;
    for (int s = 1; s <= n_samples; ++s) {
      const int delta_steps = snap[static_cast<std::size_t>(s)] -
                              snap[static_cast<std::size_t>(s - 1)];
      f = advance_vpme(f, eps, dt, delta_steps);
      const double t_now = snap[static_cast<std::size_t>(s)] * dt;
      fluid = advance_fluid(fluid, t_now - t_prev);
      t_prev = t_now;

      const MomentFields mom = moments(f);
      double l2r = 0.0, l2u = 0.0;
      for (int i = 0; i < cfg.nx; ++i) {
        double rho_blk = 0.0, mom_blk = 0.0;
        for (int bdx = 0; bdx < 8; ++bdx) {
          const std::size_t idx = static_cast<std::size_t>(8 * i + bdx);
          rho_blk += fluid.rho[idx];
          mom_blk += fluid.rho[idx] * fluid.u[idx];
        }
        const double rho_ref = rho_blk / 8.0;
        const double u_ref = mom_blk / rho_blk;
        const std::size_t ii = static_cast<std::size_t>(i);
        const double u_kin = mom.j[ii] / mom.rho[ii];
        l2r += (mom.rho[ii] - rho_ref) * (mom.rho[ii] - rho_ref);
        l2u += (u_kin - u_ref) * (u_kin - u_ref);
      }
      l2r = std::sqrt(l2r / cfg.nx);
      l2u = std::sqrt(l2u / cfg.nx);
      r.rows.push_back({t_now, eps, l2r, l2u});
      d_sum += l2r + l2u;
    }
    distances.push_back(d_sum / n_samples);
  }

  add_metric(r, "steepening_time", t_steepen);
  add_metric(r, "compare_horizon", t_compare);
  if (cfg.epsilon.size() >= 2) {
    const double ratio = max_adjacent_ratio(cfg.epsilon, distances);
    add_verdict(r, "fluid_distance_decreasing", ratio, 1.0, ratio < 1.0);
    add_metric(r, "fluid_distance_ratio_max", ratio);
  } else {
    add_metric(r, "fluid_distance_mean", distances.front());
  }
  return r;
}

// ---------------------------------------------------------------------------
// E7: narrow-beam current flattens in space as epsilon shrinks.

ExperimentReport e7_monokinetic_closure(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.columns = {"t", "epsilon", "j_sup_defect"};
  const double sigma = 0.03, u_mean = 0.05, b_u = 0.1;
  const PhaseGrid grid(cfg.nx, cfg.nv, cfg.v_max);

  std::vector<double> defects;
  for (double eps : cfg.epsilon) {
    const double dt = cfg.dt > 0.0 ? cfg.dt : auto_time_step(eps);
    const double period = kTwoPi * eps;
    const int window = std::max(1, static_cast<int>(std::llround(period / dt)));
    const double t_run = std::max(cfg.t_final, 5.75 * period);
    int steps = static_cast<int>(std::ceil(t_run / dt - 1e-9));
    steps = std::max(steps, window + 1);

    // Uniform density, narrow drifting beam u0(x) = u_mean + b_u eps cos.
    GriddedDistribution f0(grid);
    const double norm = 1.0 / (sigma * std::sqrt(kTwoPi));
    for (int i = 0; i < cfg.nx; ++i) {
      const double u0 = u_mean + b_u * eps * std::cos(kTwoPi * grid.x_center(i));
      for (int j = 0; j < cfg.nv; ++j) {
        const double z = (grid.v_center(j) - u0) / sigma;
        f0.at(i, j) = norm * std::exp(-0.5 * z * z);
      }
    }
    const double mass = f0.mass();
    for (double& v : f0.values) v /= mass;

    RunRecord rec;
    advance_vp(f0, eps, dt, steps, &rec);
    defects.push_back(sliding_window_defect(rec.j, window, true, 0.0));
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      r.rows.push_back({rec.times[k], eps,
                        sup_abs_deviation(rec.j[k], spatial_mean(rec.j[k]))});
    }
  }

  if (cfg.epsilon.size() >= 2) {
    const double ratio = max_adjacent_ratio(cfg.epsilon, defects);
    add_verdict(r, "current_defect_decreasing", ratio, 1.0, ratio < 1.0);
    add_metric(r, "current_defect_ratio_max", ratio);
  } else {
    add_metric(r, "current_defect_sup", defects.front());
  }
  return r;
}

// ---------------------------------------------------------------------------
// E8: exponential screening on the epsilon length scale.

ExperimentReport e8_debye_screening(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.columns = {"x", "epsilon", "u"};
  const double dx = 1.0 / cfg.nx;
  const double width = 5.0 * dx;

  double worst = 0.0;
  for (double eps : cfg.epsilon) {
    const std::vector<double> u = screening_profile(1.0, width, eps, cfg.nx);
    std::vector<double> ds, logs;
    for (int i = 0; i < cfg.nx; ++i) {
      const double x = (i + 0.5) * dx;
      r.rows.push_back({x, eps, u[static_cast<std::size_t>(i)]});
      const double d = x - 0.5;
      if (d >= 3.0 * eps && d <= 8.0 * eps &&
          u[static_cast<std::size_t>(i)] > 0.0) {
        ds.push_back(d);
        logs.push_back(std::log(u[static_cast<std::size_t>(i)]));
      }
    }
    if (ds.size() < 8)
      throw DomainError("screening fit window holds fewer than 8 cells");
    const double rate = -fit_slope(ds, logs);
    worst = std::max(worst, std::abs(rate * eps - 1.0));
  }

  add_verdict(r, "screening_rate", worst, 0.1, worst <= 0.1);
  add_metric(r, "screening_rate_rel_err_max", worst);
  return r;
}

}  // namespace

double auto_time_step(double epsilon) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  return kTwoPi * epsilon / 32.0;
}

GriddedDistribution cosine_maxwellian(const PhaseGrid& grid, double amplitude,
                                      int mode, double sigma, double x_shift,
                                      double v_shift) {
  if (!(sigma > 0.0)) throw ArgumentError("sigma must be positive");
  if (std::abs(amplitude) >= 1.0)
    throw ArgumentError("density amplitude must have modulus < 1");
  if (mode < 1) throw ArgumentError("mode must be >= 1");
  GriddedDistribution f(grid);
  const double norm = 1.0 / (sigma * std::sqrt(kTwoPi));
  for (int i = 0; i < grid.nx; ++i) {
    const double rho =
        1.0 + amplitude * std::cos(kTwoPi * mode * (grid.x_center(i) - x_shift));
    for (int j = 0; j < grid.nv; ++j) {
      const double z = (grid.v_center(j) - v_shift) / sigma;
      f.at(i, j) = rho * norm * std::exp(-0.5 * z * z);
    }
  }
  const double mass = f.mass();
  if (!(mass > 0.0)) throw ArgumentError("distribution has no mass on the grid");
  for (double& v : f.values) v /= mass;
  return f;
}

ExperimentReport compute_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport r;
  switch (cfg.experiment) {
    case ExperimentId::e1_free_isometry: r = e1_free_isometry(cfg); break;
    case ExperimentId::e2_oscillation: r = e2_oscillation(cfg); break;
    case ExperimentId::e3_dobrushin: r = e3_dobrushin(cfg); break;
    case ExperimentId::e4_kinetic_loeper: r = e4_kinetic_loeper(cfg); break;
    case ExperimentId::e5_quasineutral_vp: r = e5_quasineutral_vp(cfg); break;
    case ExperimentId::e6_vpme_isothermal: r = e6_vpme_isothermal(cfg); break;
    case ExperimentId::e7_monokinetic_closure:
      r = e7_monokinetic_closure(cfg);
      break;
    case ExperimentId::e8_debye_screening: r = e8_debye_screening(cfg); break;
  }
  r.experiment = cfg.experiment;
  r.config_hash = config_hash(cfg);
  r.code_version = kCodeVersion;
  return r;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep = compute_experiment(cfg);
  write_report(rep, cfg.output_dir + "/" + experiment_name(cfg.experiment));
  return rep;
}

SweepResult compute_sweep(const ExperimentConfig& cfg,
                          const std::string& parameter,
                          const std::vector<double>& values) {
  if (values.empty()) throw ArgumentError("sweep needs at least one value");
  SweepResult sw;
  sw.parameter = parameter;
  sw.values = values;

  for (double v : values) {
    ExperimentConfig c = cfg;
    if (parameter == "epsilon") {
      c.epsilon = {v};
    } else if (parameter == "k") {
      c.k = {static_cast<int>(std::llround(v))};
    } else if (parameter == "n_particles") {
      c.n_particles = static_cast<int>(std::llround(v));
    } else if (parameter == "dt") {
      c.dt = v;
    } else {
      throw ArgumentError("parameter '" + parameter +
                          "' is not sweepable (epsilon, k, n_particles, dt)");
    }
    ExperimentReport rep = compute_experiment(c);
    for (const auto& [name, value] : rep.metrics)
      sw.trend.push_back({v, name, value});
    sw.reports.push_back(std::move(rep));
  }

  auto metric_series = [&](const std::string& name,
                           std::vector<double>& out) -> bool {
    out.clear();
    for (const ExperimentReport& rep : sw.reports) {
      bool found = false;
      for (const auto& [n, val] : rep.metrics) {
        if (n == name) {
          out.push_back(val);
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  };

  if (parameter == "epsilon" && values.size() >= 2) {
    for (const char* name :
         {"window_defect_sup", "fluid_distance_mean", "current_defect_sup"}) {
      std::vector<double> series;
      if (metric_series(name, series)) {
        const double ratio = max_adjacent_ratio(values, series);
        sw.verdicts.push_back({std::string(name) + "_decreasing", ratio, 1.0,
                               ratio < 1.0});
      }
    }
  }
  if (parameter == "k" && values.size() >= 2) {
    std::vector<double> series;
    if (metric_series("w1", series)) {
      std::vector<double> lk, lw;
      for (std::size_t i = 0; i < values.size(); ++i) {
        lk.push_back(std::log(values[i]));
        lw.push_back(std::log(series[i]));
      }
      const double slope = fit_slope(lk, lw);
      sw.verdicts.push_back(
          {"w1_slope", slope, 0.05, std::abs(slope + 1.0) <= 0.05});
    }
  }
  return sw;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const std::string& parameter,
                      const std::vector<double>& values) {
  SweepResult sw = compute_sweep(cfg, parameter, values);
  write_sweep(sw, cfg.output_dir + "/sweep_" + parameter);
  return sw;
}

}  // namespace kinlab
