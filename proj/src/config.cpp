#include "kinlab/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "kinlab/csvio.hpp"
#include "kinlab/errors.hpp"

namespace kinlab {

namespace {

const std::map<ExperimentId, std::string> kNames = {
    {ExperimentId::e1_free_isometry, "E1_free_isometry"},
    {ExperimentId::e2_oscillation, "E2_oscillation"},
    {ExperimentId::e3_dobrushin, "E3_dobrushin"},
    {ExperimentId::e4_kinetic_loeper, "E4_kinetic_loeper"},
    {ExperimentId::e5_quasineutral_vp, "E5_quasineutral_vp"},
    {ExperimentId::e6_vpme_isothermal, "E6_vpme_isothermal"},
    {ExperimentId::e7_monokinetic_closure, "E7_monokinetic_closure"},
    {ExperimentId::e8_debye_screening, "E8_debye_screening"},
};

}  // namespace

std::string experiment_name(ExperimentId id) { return kNames.at(id); }

ExperimentId experiment_from_name(const std::string& name) {
  for (const auto& [id, n] : kNames) {
    if (n == name) return id;
  }
  throw ArgumentError("unknown experiment '" + name + "'");
}

std::vector<ExperimentId> all_experiments() {
  std::vector<ExperimentId> out;
  for (const auto& [id, n] : kNames) out.push_back(id);
  return out;
}

std::string experiment_description(ExperimentId id) {
  switch (id) {
    case ExperimentId::e1_free_isometry:
      return "free transport keeps the adapted distance constant while the "
             "plain quadratic distance grows";
    case ExperimentId::e2_oscillation:
      return "oscillatory densities: L1 defect stays order one while W1 "
             "decays like 1/k";
    case ExperimentId::e3_dobrushin:
      return "mean-field pairs stay within the Dobrushin growth envelope; "
             "kernel-free flow keeps the adapted distance constant";
    case ExperimentId::e4_kinetic_loeper:
      return "kinetic-cost fixed point along coupled characteristics obeys "
             "the log-Lipschitz rate and its integrated bound";
    case ExperimentId::e5_quasineutral_vp:
      return "well-prepared scaled dynamics: window-averaged density "
             "converges to 1 as epsilon shrinks, oscillating at the fast "
             "period";
    case ExperimentId::e6_vpme_isothermal:
      return "massless-electron runs approach the isothermal Euler "
             "reference before gradient steepening";
    case ExperimentId::e7_monokinetic_closure:
      return "narrow-beam data: window-averaged current flattens in space "
             "as epsilon shrinks";
    case ExperimentId::e8_debye_screening:
      return "screened potentials decay exponentially on the epsilon "
             "length scale away from a localized source";
  }
  throw ArgumentError("unknown experiment id");
}

void ExperimentConfig::validate() const {
  if (!has_seed) throw ArgumentError("config: seed is required");
  if (nx < 4 || nx > (1 << 20)) throw ArgumentError("config: nx out of range");
  if (nv < 4 || nv > (1 << 20)) throw ArgumentError("config: nv out of range");
  if (!(v_max > 0.0)) throw ArgumentError("config: v_max must be positive");
  if (epsilon.empty()) throw ArgumentError("config: epsilon list is empty");
  for (double e : epsilon) {
    if (!(e > 0.0) || e > 10.0)
      throw ArgumentError("config: epsilon entries must lie in (0, 10]");
  }
  if (dt < 0.0) throw ArgumentError("config: dt must be nonnegative");
  if (!(t_final > 0.0)) throw ArgumentError("config: T_final must be positive");
  if (n_particles < 1 || n_particles > 1000000)
    throw ArgumentError("config: n_particles out of range");
  if (eta < 0.0 || eta >= 1.0)
    throw ArgumentError("config: eta must lie in [0, 1)");
  if (k.empty()) throw ArgumentError("config: k list is empty");
  for (int kk : k) {
    if (kk < 1 || kk > nx / 2)
      throw ArgumentError("config: k entries must lie in [1, nx/2]");
  }
  if (b.empty()) throw ArgumentError("config: B list is empty");
  for (double bb : b) {
    if (bb < 0.0) throw ArgumentError("config: B entries must be nonnegative");
  }
  if (!(kappa > 0.0)) throw ArgumentError("config: kappa must be positive");
  if (output_dir.empty()) throw ArgumentError("config: output_dir is empty");
}

ExperimentConfig default_config(ExperimentId id) {
  ExperimentConfig c;
  c.experiment = id;
  switch (id) {
    case ExperimentId::e1_free_isometry:
      c.n_particles = 500;
      c.t_final = 5.0;
      break;
    case ExperimentId::e2_oscillation:
      c.nx = 32768;
      c.eta = 0.5;
      c.k = {4, 8, 16};
      break;
    case ExperimentId::e3_dobrushin:
      c.n_particles = 400;
      c.t_final = 2.0;
      c.b = {0.5, 1.0};
      break;
    case ExperimentId::e4_kinetic_loeper:
      c.epsilon = {0.05};
      c.nx = 128;
      c.nv = 128;
      c.v_max = 1.5;
      c.t_final = 2.0;
      c.n_particles = 1000;
      c.kappa = 1.0;
      break;
    case ExperimentId::e5_quasineutral_vp:
      c.nx = 128;
      c.nv = 128;
      c.v_max = 1.0;
      c.t_final = 1.0;
      break;
    case ExperimentId::e6_vpme_isothermal:
      c.nx = 128;
      c.nv = 256;
      c.v_max = 1.0;
      c.t_final = 3.0;
      break;
    case ExperimentId::e7_monokinetic_closure:
      c.nx = 128;
      c.nv = 256;
      c.v_max = 1.0;
      c.t_final = 1.0;
      break;
    case ExperimentId::e8_debye_screening:
      c.nx = 1024;
      c.epsilon = {0.05, 0.02};
      break;
  }
  return c;
}

namespace {

std::vector<double> as_double_list(const nlohmann::json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number())
        throw ArgumentError("config: '" + key + "' entries must be numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw ArgumentError("config: '" + key + "' must be a number or array");
  }
  return out;
}

std::vector<int> as_int_list(const nlohmann::json& v, const std::string& key) {
  std::vector<int> out;
  if (v.is_number_integer()) {
    out.push_back(v.get<int>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number_integer())
        throw ArgumentError("config: '" + key + "' entries must be integers");
      out.push_back(e.get<int>());
    }
  } else {
    throw ArgumentError("config: '" + key + "' must be an integer or array");
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ArgumentError("config: top level must be an object");
  if (!j.contains("experiment"))
    throw ArgumentError("config: 'experiment' key is required");
  if (!j["experiment"].is_string())
    throw ArgumentError("config: 'experiment' must be a string");

  ExperimentConfig c =
      default_config(experiment_from_name(j["experiment"].get<std::string>()));

  const std::vector<std::string> known = {
      "experiment", "nx",  "nv", "v_max", "epsilon",    "dt",   "T_final",
      "n_particles", "seed", "eta", "k",   "B",          "kappa", "output_dir"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& kname : known) ok = ok || (it.key() == kname);
    if (!ok) throw ArgumentError("config: unknown key '" + it.key() + "'");
  }

  if (j.contains("nx")) c.nx = j["nx"].get<int>();
  if (j.contains("nv")) c.nv = j["nv"].get<int>();
  if (j.contains("v_max")) c.v_max = j["v_max"].get<double>();
  if (j.contains("epsilon")) c.epsilon = as_double_list(j["epsilon"], "epsilon");
  if (j.contains("dt")) c.dt = j["dt"].get<double>();
  if (j.contains("T_final")) c.t_final = j["T_final"].get<double>();
  if (j.contains("n_particles")) c.n_particles = j["n_particles"].get<int>();
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw ArgumentError("config: 'seed' must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
    c.has_seed = true;
  }
  if (j.contains("eta")) c.eta = j["eta"].get<double>();
  if (j.contains("k")) c.k = as_int_list(j["k"], "k");
  if (j.contains("B")) c.b = as_double_list(j["B"], "B");
  if (j.contains("kappa")) c.kappa = j["kappa"].get<double>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::ostringstream s;
  s << "experiment=" << experiment_name(cfg.experiment);
  s << ";nx=" << cfg.nx << ";nv=" << cfg.nv;
  s << ";v_max=" << format_double(cfg.v_max);
  s << ";epsilon=";
  for (std::size_t i = 0; i < cfg.epsilon.size(); ++i)
    s << (i ? "," : "") << format_double(cfg.epsilon[i]);
  s << ";dt=" << format_double(cfg.dt);
  s << ";T_final=" << format_double(cfg.t_final);
  s << ";n_particles=" << cfg.n_particles;
  s << ";seed=" << cfg.seed;
  s << ";eta=" << format_double(cfg.eta);
  s << ";k=";
  for (std::size_t i = 0; i < cfg.k.size(); ++i) s << (i ? "," : "") << cfg.k[i];
  s << ";B=";
  for (std::size_t i = 0; i < cfg.b.size(); ++i)
    s << (i ? "," : "") << format_double(cfg.b[i]);
  s << ";kappa=" << format_double(cfg.kappa);
  return s.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = canonical_config(cfg);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace kinlab
