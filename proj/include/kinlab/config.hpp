#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kinlab {

enum class ExperimentId {
  e1_free_isometry,
  e2_oscillation,
  e3_dobrushin,
  e4_kinetic_loeper,
  e5_quasineutral_vp,
  e6_vpme_isothermal,
  e7_monokinetic_closure,
  e8_debye_screening,
};

// Canonical identifier strings ("E1_free_isometry", ...).
std::string experiment_name(ExperimentId id);
ExperimentId experiment_from_name(const std::string& name);
std::vector<ExperimentId> all_experiments();
// One-line human description for the catalog listing.
std::string experiment_description(ExperimentId id);

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::e1_free_isometry;
  int nx = 128;
  int nv = 128;
  double v_max = 1.0;
  std::vector<double> epsilon = {0.2, 0.1, 0.05};
  double dt = 0.0;  // 0 = choose automatically (one 32th of a plasma period)
  double t_final = 1.0;
  int n_particles = 1000;
  std::uint64_t seed = 0;
  bool has_seed = false;
  double eta = 0.5;
  std::vector<int> k = {4, 8, 16};
  std::vector<double> b = {0.5, 1.0};
  double kappa = 1.0;
  std::string output_dir = "out";

  void validate() const;  // throws ArgumentError on violations
};

// Per-experiment defaults at desk scale.
ExperimentConfig default_config(ExperimentId id);

// Parse a JSON object (flat key-value); unknown keys are rejected.  Values
// not present fall back to the per-experiment defaults.  "experiment" is
// mandatory; "seed" is mandatory unless supplied separately.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Canonical flat serialization (sorted fixed key order) and its FNV-1a hash.
std::string canonical_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

inline constexpr const char* kCodeVersion = "kinlab 1.0.0";

}  // namespace kinlab
