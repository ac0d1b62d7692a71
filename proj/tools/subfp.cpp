// subfp: run, sweep and summarize experiments.
//   exit 0  every certificate passed
//   exit 1  a certificate failed
//   exit 2  bad input or a task error
#include "subfp/config.hpp"
#include "subfp/experiment.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"subfp: Fokker-Planck experiments with subcritical confinement"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run one experiment from a config file");
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);

  std::string sweep_dir;
  int jobs = 1;
  auto* sw = app.add_subcommand("sweep", "run every *.toml in a directory");
  sw->add_option("dir", sweep_dir, "directory of configs")->required()->check(CLI::ExistingDirectory);
  sw->add_option("--jobs,-j", jobs, "parallel workers")->check(CLI::PositiveNumber);

  std::string report_dir;
  auto* rep = app.add_subcommand("report", "summarize a finished run directory");
  rep->add_option("dir", report_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const subfp::ExperimentConfig cfg = subfp::load_config(config_path);
      subfp::validate_config(cfg);
      const fs::path dir = subfp::experiment_dir(cfg, fs::path(config_path).stem().string());
      const subfp::ExperimentResult res = subfp::run_experiment(cfg, dir);
      for (const auto& c : res.certificates)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
      std::cout << "artifacts in " << dir.string() << "\n";
      return res.all_pass() ? 0 : 1;
    }
    if (*sw) {
      const auto entries = subfp::sweep(sweep_dir, jobs);
      bool ok = true;
      for (const auto& e : entries) {
        std::cout << (e.ok ? "PASS " : "FAIL ") << e.config.filename().string();
        if (!e.error.empty()) std::cout << ": " << e.error;
        else std::cout << " -> " << e.dir.string();
        std::cout << "\n";
        ok = ok && e.ok;
      }
      bool errored = false;
      for (const auto& e : entries) errored = errored || !e.error.empty();
      return errored ? 2 : (ok ? 0 : 1);
    }
    if (*rep) {
      std::cout << subfp::emit_report(report_dir);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "subfp: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
