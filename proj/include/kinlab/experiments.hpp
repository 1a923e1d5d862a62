#pragma once

#include <string>
#include <vector>

#include "kinlab/config.hpp"
#include "kinlab/phase_space.hpp"
#include "kinlab/report.hpp"

namespace kinlab {

// One 32th of the fast oscillation period 2*pi*epsilon.
double auto_time_step(double epsilon);

// f(x,v) = (1 + amplitude cos(2 pi mode (x - x_shift))) * M_sigma(v - v_shift),
// normalized to unit discrete mass.
GriddedDistribution cosine_maxwellian(const PhaseGrid& grid, double amplitude,
                                      int mode, double sigma,
                                      double x_shift = 0.0,
                                      double v_shift = 0.0);

// Runs one canonical experiment and writes report.csv / verdicts.csv /
// provenance.txt under <cfg.output_dir>/<experiment name>.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Same pipeline without touching the filesystem.
ExperimentReport compute_experiment(const ExperimentConfig& cfg);

// Repeats the experiment once per value of the swept parameter
// (one of "epsilon", "k", "n_particles", "dt"), all else identical.
// Writes trend.csv, sweep_verdicts.csv and per-value report directories
// under <cfg.output_dir>/sweep_<parameter>.
SweepResult run_sweep(const ExperimentConfig& cfg, const std::string& parameter,
                      const std::vector<double>& values);

SweepResult compute_sweep(const ExperimentConfig& cfg,
                          const std::string& parameter,
                          const std::vector<double>& values);

}  // namespace kinlab
