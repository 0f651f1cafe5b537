#pragma once

#include <array>
#include <string>
#include <vector>

#include "json.hpp"

namespace mdlab {

// Experiment description parsed from `key = value` text (one pair per line,
// '#' comments). Unknown keys are rejected so typos cannot silently fall back
// to defaults. All quantities are in code units (c = mass = 1).
struct ExperimentConfig {
  int config_version = 1;
  std::string run_name = "run";

  // grid
  int grid_n = 32;
  double grid_L = 16.0;

  // initial data: Gaussian spinor bump, spatial potential zero before the
  // constraint solve
  double epsilon = 0.05;
  double data_sigma = 2.0;
  std::array<double, 3> data_k0{};

  // stepper
  double dt = 0.05;
  double t_end = 10.0;
  bool dealias = true;
  bool linear_mode = false;
  bool charge_fix = false;

  // diagnostic budgets reported by the evolve stage (0 = h^2 for the gauge
  // residual, which is the spectral-in-space / RK4-in-time floor)
  double budget_charge_drift = 1e-8;
  double budget_lorenz = 0.0;

  // outputs
  double diag_cadence = 0.5;
  double snapshot_cadence = 0.0;   // 0 = no snapshots
  double snapshot_radius = 0.0;    // 0 = whole box
  double checkpoint_cadence = 0.0; // 0 = final checkpoint only

  // asymptotics
  std::vector<double> levels = {5.0, 7.0, 10.0};
  int vgrid_nv = 1;
  double vgrid_vmax = 0.0;
  double chart_pad = 1.3;
  double t0_init = 0.0;      // extraction starts at t0_init (1-v^2)^{-p}
  double t0_exponent_p = 1.0;

  int seed = 0;

  nlohmann::json to_json() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Inverse of to_json (missing keys keep their defaults); lets a downstream
// stage pick up the resolved config an upstream stage persisted.
ExperimentConfig config_from_json(const nlohmann::json& j);

// Throws std::invalid_argument naming the violated bound: the CFL limit, the
// v_max < 0.95 cap, or the box margin needed by the packet charts.
void validate_config(const ExperimentConfig& cfg);

// FNV-1a over the canonical JSON serialization.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace mdlab
