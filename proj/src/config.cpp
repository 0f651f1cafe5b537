#include "mdlab/config.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mdlab/evolution.hpp"
#include "mdlab/profiles.hpp"

namespace mdlab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream buf(s);
  std::string item;
  while (std::getline(buf, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": " + s);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    if (kv.count(key))
      throw std::invalid_argument("config: duplicate key " + key);
    kv[key] = val;
  }

  ExperimentConfig cfg;
  const auto take = [&](const char* key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) return "";
    const std::string v = it->second;
    kv.erase(it);
    return v;
  };
  const auto num = [&](const char* key, double& dst) {
    const std::string v = take(key);
    if (!v.empty()) dst = std::stod(v);
  };
  const auto inum = [&](const char* key, int& dst) {
    const std::string v = take(key);
    if (!v.empty()) dst = std::stoi(v);
  };
  const auto flag = [&](const char* key, bool& dst) {
    const std::string v = take(key);
    if (!v.empty()) dst = parse_bool(key, v);
  };

  inum("config_version", cfg.config_version);
  if (cfg.config_version != 1)
    throw std::invalid_argument("config: unsupported config_version (want 1)");
  {
    const std::string v = take("run_name");
    if (!v.empty()) cfg.run_name = v;
  }
  inum("grid_n", cfg.grid_n);
  num("grid_L", cfg.grid_L);
  num("epsilon", cfg.epsilon);
  num("data_sigma", cfg.data_sigma);
  {
    const std::string v = take("data_k0");
    if (!v.empty()) {
      const auto list = parse_list(v);
      if (list.size() != 3) throw std::invalid_argument("config: data_k0 wants 3 values");
      cfg.data_k0 = {list[0], list[1], list[2]};
    }
  }
  num("dt", cfg.dt);
  num("t_end", cfg.t_end);
  flag("dealias", cfg.dealias);
  flag("linear_mode", cfg.linear_mode);
  flag("charge_fix", cfg.charge_fix);
  num("budget_charge_drift", cfg.budget_charge_drift);
  num("budget_lorenz", cfg.budget_lorenz);
  num("diag_cadence", cfg.diag_cadence);
  num("snapshot_cadence", cfg.snapshot_cadence);
  num("snapshot_radius", cfg.snapshot_radius);
  num("checkpoint_cadence", cfg.checkpoint_cadence);
  {
    const std::string v = take("levels");
    if (!v.empty()) {
      cfg.levels = parse_list(v);
      if (cfg.levels.empty()) throw std::invalid_argument("config: empty levels list");
    }
  }
  inum("vgrid_nv", cfg.vgrid_nv);
  num("vgrid_vmax", cfg.vgrid_vmax);
  num("chart_pad", cfg.chart_pad);
  num("t0_init", cfg.t0_init);
  num("t0_exponent_p", cfg.t0_exponent_p);
  inum("seed", cfg.seed);

  if (!kv.empty())
    throw std::invalid_argument("config: unknown key " + kv.begin()->first);
  return cfg;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.config_version = j.value("config_version", cfg.config_version);
  if (cfg.config_version != 1)
    throw std::invalid_argument("config: unsupported config_version (want 1)");
  cfg.run_name = j.value("run_name", cfg.run_name);
  cfg.grid_n = j.value("grid_n", cfg.grid_n);
  cfg.grid_L = j.value("grid_L", cfg.grid_L);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.data_sigma = j.value("data_sigma", cfg.data_sigma);
  cfg.data_k0 = j.value("data_k0", cfg.data_k0);
  cfg.dt = j.value("dt", cfg.dt);
  cfg.t_end = j.value("t_end", cfg.t_end);
  cfg.dealias = j.value("dealias", cfg.dealias);
  cfg.linear_mode = j.value("linear_mode", cfg.linear_mode);
  cfg.charge_fix = j.value("charge_fix", cfg.charge_fix);
  cfg.budget_charge_drift = j.value("budget_charge_drift", cfg.budget_charge_drift);
  cfg.budget_lorenz = j.value("budget_lorenz", cfg.budget_lorenz);
  cfg.diag_cadence = j.value("diag_cadence", cfg.diag_cadence);
  cfg.snapshot_cadence = j.value("snapshot_cadence", cfg.snapshot_cadence);
  cfg.snapshot_radius = j.value("snapshot_radius", cfg.snapshot_radius);
  cfg.checkpoint_cadence = j.value("checkpoint_cadence", cfg.checkpoint_cadence);
  cfg.levels = j.value("levels", cfg.levels);
  cfg.vgrid_nv = j.value("vgrid_nv", cfg.vgrid_nv);
  cfg.vgrid_vmax = j.value("vgrid_vmax", cfg.vgrid_vmax);
  cfg.chart_pad = j.value("chart_pad", cfg.chart_pad);
  cfg.t0_init = j.value("t0_init", cfg.t0_init);
  cfg.t0_exponent_p = j.value("t0_exponent_p", cfg.t0_exponent_p);
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.grid_n < 8 || cfg.grid_n % 2 != 0)
    throw std::invalid_argument("config: grid_n must be even and >= 8");
  if (cfg.grid_L <= 0.0) throw std::invalid_argument("config: grid_L must be positive");
  if (cfg.epsilon < 0.0) throw std::invalid_argument("config: epsilon must be >= 0");
  if (cfg.data_sigma <= 0.0) throw std::invalid_argument("config: data_sigma must be positive");
  if (cfg.dt <= 0.0 || cfg.t_end < 0.0)
    throw std::invalid_argument("config: dt must be positive and t_end >= 0");

  // CFL bound (throws naming the limit)
  StepperConfig sc;
  sc.dt = cfg.dt;
  sc.t_end = cfg.t_end;
  validate_cfl(GridSpec{cfg.grid_n, cfg.grid_L}, sc);

  // v_max bound
  if (cfg.vgrid_vmax < 0.0 || cfg.vgrid_vmax > 0.95)
    throw std::invalid_argument("config: v_max bound violated (vgrid_vmax must be <= 0.95)");
  if (cfg.vgrid_nv < 1) throw std::invalid_argument("config: vgrid_nv must be >= 1");

  // box margin: every packet chart must fit inside the periodic box
  const double h = cfg.grid_L / cfg.grid_n;
  for (double rho : cfg.levels) {
    if (rho <= 0.0) throw std::invalid_argument("config: levels must be positive");
    const double vm = cfg.vgrid_vmax;
    const std::array<double, 3> vworst = {vm, 0.0, 0.0};
    const HyperboloidChart chart = packet_chart(BoostVelocity(vworst), rho, h, cfg.chart_pad);
    double reach = 0.0;
    for (int d = 0; d < 3; ++d)
      reach = std::max(reach, std::abs(chart.center[d]) + chart.radius);
    if (reach > 0.5 * cfg.grid_L - 2.0 * h)
      throw std::invalid_argument(
          "config: box margin violated (packet chart at level " + std::to_string(rho) +
          " reaches " + std::to_string(reach) + ", box half-width " +
          std::to_string(0.5 * cfg.grid_L) + ")");
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["config_version"] = config_version;
  j["run_name"] = run_name;
  j["grid_n"] = grid_n;
  j["grid_L"] = grid_L;
  j["epsilon"] = epsilon;
  j["data_sigma"] = data_sigma;
  j["data_k0"] = data_k0;
  j["dt"] = dt;
  j["t_end"] = t_end;
  j["dealias"] = dealias;
  j["linear_mode"] = linear_mode;
  j["charge_fix"] = charge_fix;
  j["budget_charge_drift"] = budget_charge_drift;
  j["budget_lorenz"] = budget_lorenz;
  j["diag_cadence"] = diag_cadence;
  j["snapshot_cadence"] = snapshot_cadence;
  j["snapshot_radius"] = snapshot_radius;
  j["checkpoint_cadence"] = checkpoint_cadence;
  j["levels"] = levels;
  j["vgrid_nv"] = vgrid_nv;
  j["vgrid_vmax"] = vgrid_vmax;
  j["chart_pad"] = chart_pad;
  j["t0_init"] = t0_init;
  j["t0_exponent_p"] = t0_exponent_p;
  j["seed"] = seed;
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = cfg.to_json().dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mdlab
