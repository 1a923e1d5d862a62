#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kinlab/config.hpp"
#include "kinlab/csvio.hpp"
#include "kinlab/dynamics.hpp"
#include "kinlab/errors.hpp"
#include "kinlab/experiments.hpp"
#include "kinlab/phase_space.hpp"
#include "kinlab/report.hpp"
#include "kinlab/transport.hpp"

namespace {

using namespace kinlab;

struct CommonFlags {
  std::string config_path;
  std::string experiment;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string out;
  bool quiet = false;
};

void attach_common(CLI::App* cmd, CommonFlags& fl) {
  cmd->add_option("--config", fl.config_path, "JSON config file");
  cmd->add_option("--experiment", fl.experiment,
                  "experiment id (defaults config; exclusive with --config)");
  cmd->add_option("--seed", fl.seed, "RNG seed (overrides config)")
      ->each([&fl](const std::string&) { fl.has_seed = true; });
  cmd->add_option("--out", fl.out, "output directory (overrides config)");
  cmd->add_flag("--quiet", fl.quiet, "suppress progress output");
}

ExperimentConfig resolve_config(const CommonFlags& fl) {
  ExperimentConfig cfg;
  if (!fl.config_path.empty() && !fl.experiment.empty())
    throw ArgumentError("--config and --experiment are mutually exclusive");
  if (!fl.config_path.empty()) {
    cfg = load_config(fl.config_path);
  } else if (!fl.experiment.empty()) {
    cfg = default_config(experiment_from_name(fl.experiment));
  } else {
    throw ArgumentError("either --config or --experiment is required");
  }
  if (fl.has_seed) {
    cfg.seed = fl.seed;
    cfg.has_seed = true;
  }
  if (!fl.out.empty()) cfg.output_dir = fl.out;
  cfg.validate();
  return cfg;
}

void print_verdicts(const std::vector<Verdict>& verdicts) {
  for (const Verdict& v : verdicts) {
    std::printf("  %-32s measured=%s tolerance=%s %s\n", v.name.c_str(),
                format_double(v.measured).c_str(),
                format_double(v.tolerance).c_str(), v.pass ? "PASS" : "FAIL");
  }
}

int cmd_run(const CommonFlags& fl) {
  const ExperimentConfig cfg = resolve_config(fl);
  const ExperimentReport rep = run_experiment(cfg);
  if (!fl.quiet) {
    std::printf("%s (config %s)\n", experiment_name(cfg.experiment).c_str(),
                rep.config_hash.c_str());
    print_verdicts(rep.verdicts);
    std::printf("result: %s\n", rep.all_pass() ? "PASS" : "FAIL");
  }
  return rep.all_pass() ? 0 : 1;
}

int cmd_sweep(const CommonFlags& fl, const std::string& parameter,
              const std::vector<double>& values) {
  const ExperimentConfig cfg = resolve_config(fl);
  const SweepResult sw = run_sweep(cfg, parameter, values);
  if (!fl.quiet) {
    std::printf("%s sweep over %s (%zu values)\n",
                experiment_name(cfg.experiment).c_str(), parameter.c_str(),
                values.size());
    for (std::size_t i = 0; i < sw.reports.size(); ++i) {
      std::printf(" value %s: %s\n", format_double(sw.values[i]).c_str(),
                  sw.reports[i].all_pass() ? "PASS" : "FAIL");
      print_verdicts(sw.reports[i].verdicts);
    }
    print_verdicts(sw.verdicts);
    std::printf("result: %s\n", sw.all_pass() ? "PASS" : "FAIL");
  }
  return sw.all_pass() ? 0 : 1;
}

bool looks_like_ensemble(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  return line.rfind("x_0", 0) == 0;
}

int cmd_distance(const std::string& file_a, const std::string& file_b,
                 const std::string& cost_name, int p, double t, double epsilon,
                 const std::string& t_grid, const std::string& sweep_out,
                 const std::string& coupling_out) {
  const bool ens_a = looks_like_ensemble(file_a);
  const bool ens_b = looks_like_ensemble(file_b);
  if (ens_a != ens_b)
    throw ArgumentError("cannot mix ensemble and gridded inputs");

  if (!ens_a) {
    if (cost_name != "standard" || p != 1)
      throw ArgumentError(
          "gridded inputs support only --cost standard --p 1 "
          "(exact 1D transport on the position marginal)");
    const GriddedDistribution fa = load_distribution(file_a);
    const GriddedDistribution fb = load_distribution(file_b);
    if (!(fa.grid == fb.grid))
      throw ArgumentError("gridded inputs must share the same grid");
    const double value = w1_1d(moments(fa).rho, moments(fb).rho, Space::torus);
    std::printf("%s\n", format_double(value).c_str());
    return 0;
  }

  const ParticleEnsemble a = load_ensemble(file_a);
  const ParticleEnsemble b = load_ensemble(file_b);
  CostSpec spec;
  if (cost_name == "standard") {
    spec = CostSpec::standard_p(p);
  } else if (cost_name == "adapted") {
    spec = CostSpec::free_adapted(t, p);
  } else if (cost_name == "kinetic") {
    spec = CostSpec::kinetic(epsilon);
  } else {
    throw ArgumentError("unknown cost '" + cost_name +
                        "' (standard, adapted, kinetic)");
  }

  const OtResult res = exact_discrete_ot(a, b, spec);
  std::printf("%s\n", format_double(res.cost).c_str());

  if (!coupling_out.empty()) {
    CsvWriter out(coupling_out, {"i", "j", "mass"});
    for (const Coupling::Entry& e : res.coupling.plan) {
      out.row_text({std::to_string(e.i), std::to_string(e.j),
                    format_double(e.mass)});
    }
  }

  if (!t_grid.empty()) {
    if (sweep_out.empty())
      throw ArgumentError("--t-grid requires --sweep-out");
    double t0 = 0.0, t1 = 0.0;
    int n = 0;
    if (std::sscanf(t_grid.c_str(), "%lf:%lf:%d", &t0, &t1, &n) != 3 || n < 2)
      throw ArgumentError("--t-grid expects t0:t1:n with n >= 2");
    CsvWriter out(sweep_out, {"t", "value", "cost_kind", "epsilon"});
    for (int i = 0; i < n; ++i) {
      const double tt = t0 + (t1 - t0) * i / (n - 1);
      CostSpec s = spec;
      s.t = tt;
      const double value = exact_discrete_ot(a, b, s).cost;
      out.row_text({format_double(tt), format_double(value), cost_name,
                    format_double(s.epsilon)});
    }
  }
  return 0;
}

int cmd_simulate(const std::string& model, int nx, int nv, double v_max,
                 double epsilon, double dt, double t_final, double sigma,
                 double amplitude, int mode, double u_mean, int snapshot_every,
                 const std::string& out_dir, bool quiet) {
  if (model != "vp" && model != "vpme")
    throw ArgumentError("unknown model '" + model + "' (vp, vpme)");
  const PhaseGrid grid(nx, nv, v_max);
  GriddedDistribution f = cosine_maxwellian(grid, amplitude, mode, sigma, 0.0,
                                            u_mean);
  const double step = dt > 0.0 ? dt : auto_time_step(epsilon);
  const int steps = static_cast<int>(std::ceil(t_final / step - 1e-9));
  const bool vpme = (model == "vpme");

  std::filesystem::create_directories(out_dir);
  auto snapshot_path = [&](int k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%06d.txt", k);
    return out_dir + "/" + buf;
  };
  save_distribution(snapshot_path(0), f);

  CsvWriter diag(out_dir + "/diagnostics.csv",
                 {"t", "mass", "kinetic_energy", "field_energy", "rho_min",
                  "rho_max", "clipped_mass"});
  const int chunk = snapshot_every > 0 ? snapshot_every : steps;
  double clip_base = 0.0;
  int done = 0;
  bool first = true;
  while (done < steps) {
    const int len = std::min(chunk, steps - done);
    RunRecord rec;
    f = vpme ? advance_vpme(f, epsilon, step, len, &rec)
             : advance_vp(f, epsilon, step, len, &rec);
    for (std::size_t k = first ? 0 : 1; k < rec.diagnostics.size(); ++k) {
      const DiagnosticsRow& d = rec.diagnostics[k];
      diag.row({done * step + d.t, d.mass, d.kinetic_energy, d.field_energy,
                d.rho_min, d.rho_max, clip_base + d.clipped_mass});
    }
    clip_base += rec.diagnostics.back().clipped_mass;
    done += len;
    first = false;
    if (snapshot_every > 0 || done == steps) save_distribution(snapshot_path(done), f);
  }
  save_distribution(out_dir + "/final_state.txt", f);
  if (!quiet)
    std::printf("%s: %d steps of %s written to %s\n", model.c_str(), steps,
                format_double(step).c_str(), out_dir.c_str());
  return 0;
}

int cmd_list() {
  for (ExperimentId id : all_experiments()) {
    std::printf("%-24s %s\n", experiment_name(id).c_str(),
                experiment_description(id).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kinlab: scaled kinetic-transport laboratory"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run one canonical experiment");
  attach_common(run, run_flags);

  CommonFlags sweep_flags;
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "repeat a run over a parameter");
  attach_common(sweep, sweep_flags);
  sweep->add_option("--parameter", sweep_parameter,
                    "epsilon, k, n_particles, or dt")
      ->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")
      ->required()
      ->delimiter(',');

  std::string dist_a, dist_b, dist_cost = "standard", dist_tgrid, dist_sweep_out,
              dist_coupling_out;
  int dist_p = 2;
  double dist_t = 0.0, dist_eps = 1.0;
  CLI::App* dist = app.add_subcommand(
      "distance", "transport distance between two serialized states");
  dist->add_option("file_a", dist_a, "first input")->required();
  dist->add_option("file_b", dist_b, "second input")->required();
  dist->add_option("--cost", dist_cost, "standard, adapted, or kinetic");
  dist->add_option("--p", dist_p, "cost exponent (1 or 2)");
  dist->add_option("--t", dist_t, "pullback time for the adapted cost");
  dist->add_option("--epsilon", dist_eps, "scale for the kinetic cost");
  dist->add_option("--t-grid", dist_tgrid, "t0:t1:n sweep of the cost time");
  dist->add_option("--sweep-out", dist_sweep_out, "CSV path for the t sweep");
  dist->add_option("--coupling-out", dist_coupling_out,
                   "CSV path for the optimal plan");

  std::string sim_model = "vp", sim_out = "out/simulate";
  int sim_nx = 128, sim_nv = 128, sim_mode = 1, sim_snap = 0;
  double sim_vmax = 1.0, sim_eps = 0.1, sim_dt = 0.0, sim_t = 1.0;
  double sim_sigma = 0.05, sim_amp = 0.1, sim_umean = 0.0;
  bool sim_quiet = false;
  CLI::App* sim = app.add_subcommand("simulate", "raw stepper with snapshots");
  sim->add_option("--model", sim_model, "vp or vpme");
  sim->add_option("--nx", sim_nx, "position cells");
  sim->add_option("--nv", sim_nv, "velocity cells");
  sim->add_option("--v-max", sim_vmax, "velocity truncation");
  sim->add_option("--epsilon", sim_eps, "Debye ratio");
  sim->add_option("--dt", sim_dt, "time step (0 = auto)");
  sim->add_option("--t-final", sim_t, "horizon");
  sim->add_option("--sigma", sim_sigma, "thermal width");
  sim->add_option("--amplitude", sim_amp, "density perturbation amplitude");
  sim->add_option("--mode", sim_mode, "density perturbation mode");
  sim->add_option("--u-mean", sim_umean, "mean drift velocity");
  sim->add_option("--snapshot-every", sim_snap, "steps between snapshots (0 = final only)");
  sim->add_option("--out", sim_out, "output directory");
  sim->add_flag("--quiet", sim_quiet, "suppress progress output");

  CLI::App* list = app.add_subcommand("list", "experiment catalog");
  (void)list;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("run")) return cmd_run(run_flags);
    if (app.got_subcommand("sweep"))
      return cmd_sweep(sweep_flags, sweep_parameter, sweep_values);
    if (app.got_subcommand("distance"))
      return cmd_distance(dist_a, dist_b, dist_cost, dist_p, dist_t, dist_eps,
                          dist_tgrid, dist_sweep_out, dist_coupling_out);
    if (app.got_subcommand("simulate"))
      return cmd_simulate(sim_model, sim_nx, sim_nv, sim_vmax, sim_eps, sim_dt,
                          sim_t, sim_sigma, sim_amp, sim_mode, sim_umean,
                          sim_snap, sim_out, sim_quiet);
    if (app.got_subcommand("list")) return cmd_list();
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "usage/config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  std::fprintf(stderr, "no subcommand given\n");
  return 2;
}
