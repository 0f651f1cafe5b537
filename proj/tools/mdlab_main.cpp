#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "mdlab/parallel.hpp"
#include "mdlab/runner.hpp"

namespace {

void add_common(CLI::App* sub, mdlab::RunOptions& opt, bool needs_config) {
  auto* c = sub->add_option("--config", opt.config_path, "key = value config file");
  if (needs_config) c->check(CLI::ExistingFile);
  sub->add_option("--out", opt.out_dir, "output directory (default mdlab-out)");
}

void add_physics_flags(CLI::App* sub, mdlab::RunOptions& opt) {
  sub->add_flag_callback("--linear-mode",
                         [&opt] { opt.linear_mode = true; },
                         "drop the coupling terms and compare against closed-form propagators");
  sub->add_option_function<std::string>(
         "--charge-fix",
         [&opt](const std::string& s) {
           if (s == "on")
             opt.charge_fix = true;
           else if (s == "off")
             opt.charge_fix = false;
           else
             throw CLI::ValidationError("--charge-fix", "expected 'on' or 'off'");
         },
         "exterior Coulomb subtraction on the potential data")
      ->option_text("{on,off}");
}

}  // namespace

int main(int argc, char** argv) {
  mdlab::init_threads();

  CLI::App app{"Maxwell-Dirac numerical laboratory"};
  app.set_version_flag("--version", std::string("mdlab ") + mdlab::kToolVersion);
  app.require_subcommand(1);

  mdlab::RunOptions opt;

  auto* algebra = app.add_subcommand("algebra-check",
                                     "matrix algebra, projector, and operator-identity suites");
  add_common(algebra, opt, false);

  auto* evolve = app.add_subcommand("evolve", "integrate the coupled system from Gaussian data");
  add_common(evolve, opt, true);
  add_physics_flags(evolve, opt);
  evolve->add_flag("--resume", opt.resume, "continue from the newest checkpoint in --out");

  auto* profiles =
      app.add_subcommand("profiles", "extract asymptotic profiles from recorded snapshots");
  add_common(profiles, opt, false);

  auto* coupling = app.add_subcommand("coupling",
                                      "solve the limit equation and renormalize the profiles");
  add_common(coupling, opt, false);

  auto* report = app.add_subcommand("report", "aggregate stage summaries into report.json");
  add_common(report, opt, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (algebra->parsed()) return mdlab::cmd_algebra_check(opt);
    if (evolve->parsed()) return mdlab::cmd_evolve(opt);
    if (profiles->parsed()) return mdlab::cmd_profiles(opt);
    if (coupling->parsed()) return mdlab::cmd_coupling(opt);
    if (report->parsed()) return mdlab::cmd_report(opt);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
