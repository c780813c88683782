#include <iostream>

#include "CLI11.hpp"
#include "scenario.hpp"

int main(int argc, char** argv) {
  using namespace qmod::cli;
  CLI::App app{"qmod: ring-modulus bounds, Orlicz certificates and capacity oracles"};
  app.require_subcommand(1);

  std::string run_config;
  std::string out_dir;
  int jobs = 1;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "Run a scenario and write its outputs");
  run->add_option("config", run_config, "Scenario config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--jobs", jobs, "Worker threads for grid solves")->check(CLI::PositiveNumber);
  run->add_flag("--verbose", verbose, "Print the written files");

  std::string check_config;
  auto* validate = app.add_subcommand("validate", "Check a scenario config without running it");
  validate->add_option("config", check_config, "Scenario config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*validate) {
      validate_scenario(check_config);
      std::cout << "ok\n";
      return kExitOk;
    }
    RunOptions opt;
    if (!out_dir.empty()) opt.out_dir = out_dir;
    opt.jobs = jobs;
    opt.verbose = verbose;
    const RunResult r = run_scenario(run_config, opt);
    if (verbose) {
      for (const auto& f : r.files) std::cout << f.string() << '\n';
      std::cout << (r.out_dir / "manifest.txt").string() << '\n';
    }
    if (r.code != kExitOk) std::cerr << format_error(r.code, r.reason) << '\n';
    return r.code;
  } catch (const ScenarioError& e) {
    std::cerr << format_error(e.code(), e.what()) << '\n';
    return e.code();
  }
}
