#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "mdlab/io.hpp"
#include "mdlab/runner.hpp"

using namespace mdlab;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("mdlab-run-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string str() const { return path.string(); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static inline int counter = 0;
};

struct EnvGuard {
  const char* key;
  explicit EnvGuard(const char* k) : key(k) {}
  ~EnvGuard() { ::unsetenv(key); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// small box + short clock so the pipeline smoke stays cheap; levels kept low
// enough that the packet charts fit the box with margin
const char* kTinyRun =
    "grid_n = 16\n"
    "grid_L = 14\n"
    "epsilon = 0.1\n"
    "data_sigma = 1.5\n"
    "dt = 0.1\n"
    "t_end = 0.4\n"
    "diag_cadence = 0.2\n"
    "checkpoint_cadence = 0.2\n"
    "levels = 2\n";

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("run config resolution applies overrides and validates") {
  RunOptions opt;
  const ExperimentConfig base = load_run_config(opt);
  CHECK(base.grid_n == 32);
  CHECK_FALSE(base.linear_mode);

  opt.linear_mode = true;
  opt.charge_fix = true;
  const ExperimentConfig flipped = load_run_config(opt);
  CHECK(flipped.linear_mode);
  CHECK(flipped.charge_fix);

  TempDir tmp;
  write_text(tmp.file("bad.cfg"), "dt = 0.5\n");  // breaks the CFL bound at defaults
  RunOptions bad;
  bad.config_path = tmp.file("bad.cfg");
  CHECK_THROWS_AS(load_run_config(bad), std::invalid_argument);
  RunOptions missing;
  missing.config_path = tmp.file("nope.cfg");
  CHECK_THROWS_AS(load_run_config(missing), std::runtime_error);
}

TEST_CASE("algebra check passes clean and freezes its suite roster") {
  TempDir tmp;
  RunOptions opt;
  opt.out_dir = tmp.str();
  CHECK(cmd_algebra_check(opt) == 0);

  const io::json sum = io::read_json(tmp.str() + "/algebra/summary.json");
  CHECK(sum.at("status") == "ok");
  CHECK_FALSE(sum.at("fault_injection").get<bool>());
  const std::vector<std::string> expected{
      "gamma anticommutator",       "gamma adjoint",
      "current density",            "radial projector eigenstructure",
      "boost projector family",     "projector derivative order",
      "generator commutation order", "product rule (spinor) order",
      "product rule (current) order"};
  const auto& suites = sum.at("suites");
  REQUIRE(suites.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(suites[i].at("name") == expected[i]);
    CHECK(suites[i].at("pass").get<bool>());
  }

  const io::json man = io::read_json(tmp.str() + "/algebra/manifest.json");
  CHECK(man.at("stage") == "algebra");
  CHECK(man.at("files").size() >= 1);
}

TEST_CASE("fault injection trips the first algebra suite") {
  TempDir tmp;
  RunOptions opt;
  opt.out_dir = tmp.str();
  EnvGuard guard("MDLAB_INJECT_GAMMA_FLIP");
  ::setenv("MDLAB_INJECT_GAMMA_FLIP", "1", 1);
  CHECK(cmd_algebra_check(opt) == 1);
  const io::json sum = io::read_json(tmp.str() + "/algebra/summary.json");
  CHECK(sum.at("status") == "failed");
  CHECK(sum.at("fault_injection").get<bool>());
  CHECK(sum.at("first_failure") == "gamma anticommutator");
}

TEST_CASE("tiny linear run: artifacts, oracle gap, byte-stable rerun") {
  TempDir tmp;
  write_text(tmp.file("run.cfg"), kTinyRun);

  const auto run = [&](const std::string& out) {
    RunOptions opt;
    opt.config_path = tmp.file("run.cfg");
    opt.out_dir = out;
    opt.linear_mode = true;  // exercise the flag override path
    return cmd_evolve(opt);
  };
  const std::string out1 = tmp.file("a"), out2 = tmp.file("b");
  REQUIRE(run(out1) == 0);
  REQUIRE(run(out2) == 0);

  for (const char* f : {"/evolve/config.json", "/evolve/data.bin", "/evolve/diagnostics.csv",
                        "/evolve/final_state.bin", "/evolve/summary.json",
                        "/evolve/manifest.json"})
    CHECK(io::file_exists(out1 + f));

  const io::json sum = io::read_json(out1 + "/evolve/summary.json");
  CHECK(sum.at("status") == "ok");
  CHECK(sum.at("t_final").get<double>() == doctest::Approx(0.4));
  CHECK_FALSE(sum.at("instant_path").get<bool>());
  CHECK(sum.at("psi0_l2_sq").get<double>() > 0.0);
  CHECK(sum.at("charge_drift").get<double>() <= 1e-10);
  CHECK(sum.at("budgets").at("charge_drift_ok").get<bool>());
  CHECK(sum.at("budgets").at("lorenz_ok").get<bool>());
  CHECK(sum.at("oracle").at("psi_l2_error").get<double>() <= 1e-3);
  const io::json echoed = io::read_json(out1 + "/evolve/config.json");
  CHECK(echoed.at("linear_mode").get<bool>());

  // data artifacts are byte-identical across re-runs (only the manifest times)
  for (const char* f : {"/evolve/data.bin", "/evolve/final_state.bin",
                        "/evolve/diagnostics.csv", "/evolve/summary.json"})
    CHECK(read_bytes(out1 + f) == read_bytes(out2 + f));
}

TEST_CASE("epsilon zero takes the instant path") {
  TempDir tmp;
  write_text(tmp.file("zero.cfg"),
             "grid_n = 16\ngrid_L = 14\nepsilon = 0\ndata_sigma = 1.5\n"
             "dt = 0.1\nt_end = 0.4\nlevels = 2\n");
  RunOptions opt;
  opt.config_path = tmp.file("zero.cfg");
  opt.out_dir = tmp.file("out");
  CHECK(cmd_evolve(opt) == 0);
  const io::json sum = io::read_json(opt.out_dir + "/evolve/summary.json");
  CHECK(sum.at("instant_path").get<bool>());
  CHECK(sum.at("t_final").get<double>() == doctest::Approx(0.4));
  CHECK(sum.at("charge_drift").get<double>() == 0.0);
  CHECK(sum.at("psi0_l2_sq").get<double>() == 0.0);
}

TEST_CASE("resume from the rolling checkpoint matches the straight run") {
  TempDir tmp;
  write_text(tmp.file("full.cfg"), kTinyRun);  // t_end = 0.4
  write_text(tmp.file("half.cfg"),
             "grid_n = 16\ngrid_L = 14\nepsilon = 0.1\ndata_sigma = 1.5\n"
             "dt = 0.1\nt_end = 0.2\ndiag_cadence = 0.2\ncheckpoint_cadence = 0.2\n"
             "levels = 2\n");

  RunOptions straight;
  straight.config_path = tmp.file("full.cfg");
  straight.out_dir = tmp.file("straight");
  REQUIRE(cmd_evolve(straight) == 0);

  RunOptions first;
  first.config_path = tmp.file("half.cfg");
  first.out_dir = tmp.file("resumed");
  REQUIRE(cmd_evolve(first) == 0);

  RunOptions second;
  second.config_path = tmp.file("full.cfg");
  second.out_dir = tmp.file("resumed");
  second.resume = true;
  REQUIRE(cmd_evolve(second) == 0);

  const io::json sum = io::read_json(tmp.file("resumed") + "/evolve/summary.json");
  CHECK(sum.at("t_final").get<double>() == doctest::Approx(0.4));
  CHECK(read_bytes(tmp.file("resumed") + "/evolve/final_state.bin") ==
        read_bytes(tmp.file("straight") + "/evolve/final_state.bin"));
  CHECK(read_bytes(tmp.file("resumed") + "/evolve/diagnostics.csv") ==
        read_bytes(tmp.file("straight") + "/evolve/diagnostics.csv"));
}

TEST_CASE("profiles and coupling stages consume the recorded run") {
  TempDir tmp;
  write_text(tmp.file("pipe.cfg"),
             "grid_n = 16\ngrid_L = 14\nepsilon = 0.1\ndata_sigma = 1.5\n"
             "dt = 0.1\nt_end = 6\ndiag_cadence = 1\nsnapshot_cadence = 0.25\n"
             "levels = 2, 2.5, 3\nvgrid_nv = 3\nvgrid_vmax = 0.2\n");
  RunOptions opt;
  opt.config_path = tmp.file("pipe.cfg");
  opt.out_dir = tmp.file("out");
  REQUIRE(cmd_evolve(opt) == 0);

  RunOptions stage;  // downstream stages pick up the persisted config
  stage.out_dir = tmp.file("out");
  REQUIRE(cmd_profiles(stage) == 0);
  const io::json psum = io::read_json(stage.out_dir + "/profiles/summary.json");
  CHECK(psum.at("status") == "ok");
  CHECK(psum.at("nodes_lattice").get<int>() == 7);
  CHECK(psum.at("nodes_extracted").get<int>() == 7);
  CHECK(psum.at("levels") == io::json({2.0, 2.5, 3.0}));
  CHECK(io::file_exists(stage.out_dir + "/profiles/histories.csv"));
  CHECK(io::file_exists(stage.out_dir + "/profiles/cauchy.csv"));
  CHECK(io::file_exists(stage.out_dir + "/profiles/profiles.bin"));
  const io::CsvTable hist = io::read_csv(stage.out_dir + "/profiles/histories.csv");
  CHECK(hist.rows.size() == 21);  // 7 nodes x 3 levels
  CHECK(hist.column_index("norm_plus") >= 0);

  REQUIRE(cmd_coupling(stage) == 0);
  const io::json csum = io::read_json(stage.out_dir + "/coupling/summary.json");
  CHECK(csum.at("status") == "ok");
  CHECK(csum.at("helmholtz_residual").get<double>() >= 0.0);
  CHECK(csum.at("renormalization").at("nodes_tested").get<int>() == 7);
  CHECK(csum.at("energy_identity").contains("rel_gap"));
  CHECK(csum.at("b0_max").get<double>() <= 0.0);
  CHECK(io::file_exists(stage.out_dir + "/coupling/cauchy_renorm.csv"));
  CHECK(io::file_exists(stage.out_dir + "/coupling/a_inf.bin"));
  const io::CsvTable ren = io::read_csv(stage.out_dir + "/coupling/cauchy_renorm.csv");
  for (const char* col : {"raw_plus", "renorm_plus", "raw_minus", "renorm_minus"})
    CHECK(ren.column_index(col) >= 0);

  REQUIRE(cmd_report(stage) == 0);
  const io::json rep = io::read_json(stage.out_dir + "/report.json");
  CHECK(rep.at("all_ok").get<bool>());
  CHECK(rep.at("stages").contains("evolve"));
  CHECK(rep.at("stages").contains("profiles"));
  CHECK(rep.at("stages").contains("coupling"));

  RunOptions empty;
  empty.out_dir = tmp.file("nothing-here");
  CHECK(cmd_report(empty) == 2);
  CHECK_THROWS_AS(cmd_profiles(empty), std::invalid_argument);
}

}  // TEST_SUITE
