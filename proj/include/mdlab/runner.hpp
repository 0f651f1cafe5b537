#pragma once

#include <optional>
#include <string>

#include "mdlab/config.hpp"

namespace mdlab {

inline constexpr const char* kToolVersion = "0.1.0";

// Command-line options shared by every subcommand. Stages write their
// artifacts under <out_dir>/<stage>/ and locate upstream artifacts by the
// same convention, so a pipeline is one directory.
struct RunOptions {
  std::string config_path;  // empty = built-in defaults
  std::string out_dir = "mdlab-out";
  bool resume = false;
  std::optional<bool> linear_mode;  // flag overrides applied after parsing
  std::optional<bool> charge_fix;
};

// Parse (file or defaults), apply CLI overrides, validate. Throws
// std::invalid_argument naming the violated bound.
ExperimentConfig load_run_config(const RunOptions& opt);

// Identity suites over the matrix algebra, the projector family, and the
// discrete symmetry generators; prints one line per suite with its max error
// and writes <out>/algebra/summary.json. Exit 0 iff every suite passes.
// Setting MDLAB_INJECT_GAMMA_FLIP flips one matrix entry first (fault
// injection for the harness; the run must then fail).
int cmd_algebra_check(const RunOptions& opt);

// Data synthesis -> constraint solve -> RK4 evolution with diagnostics,
// snapshots, and checkpoints under <out>/evolve/. --resume continues from the
// rolling checkpoint. Loss of finiteness aborts with a checkpoint. In linear
// mode the final state is compared against the exact free propagators.
int cmd_evolve(const RunOptions& opt);

// Wave-packet testing of the recorded snapshot series on every configured
// hyperboloid level and velocity node; extracts profile histories, limits,
// and Cauchy-difference tables under <out>/profiles/.
int cmd_profiles(const RunOptions& opt);

// Source assembly and Green-kernel solve of the asymptotic potential
// equation, residual + energy-identity checks, log-phase renormalized
// re-extraction, and reconstruction error against late snapshots, under
// <out>/coupling/.
int cmd_coupling(const RunOptions& opt);

// Aggregates the per-stage summaries into <out>/report.json and prints a
// status table. Exit 0 iff every stage found reported ok.
int cmd_report(const RunOptions& opt);

}  // namespace mdlab
