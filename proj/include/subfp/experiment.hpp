#pragma once

#include "subfp/config.hpp"
#include "subfp/grid.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace subfp {

struct Certificate {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::filesystem::path dir;
  std::vector<Certificate> certificates;
  std::vector<std::string> files;  // written artifacts, relative to dir
  bool all_pass() const;
};

/// Initial datum from the initial.* keys; G is needed for mean_zero.
Density build_initial(const ExperimentConfig& cfg, const Grid& grid, const Density* G = nullptr);

/// Output directory for a run: SUBFP_OUT (if set) or ./subfp-out, joined with
/// cfg.output, falling back to `stem` and then to run-<hash>. An absolute
/// cfg.output is used as is unless SUBFP_OUT is set.
std::filesystem::path experiment_dir(const ExperimentConfig& cfg, const std::string& stem = "");

/// Validates (nothing is written on failure), runs the tasks and writes the
/// artifacts into `dir`. Task failures are rethrown with the task name.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& dir);

/// One-page text summary of a run directory. Throws if summary.json or
/// config.toml is missing.
std::string emit_report(const std::filesystem::path& dir);

struct SweepEntry {
  std::filesystem::path config;
  std::filesystem::path dir;
  bool ok = false;  // ran and every certificate passed
  std::string error;
};

/// Runs every *.toml in `dir` (sorted by name) with `jobs` worker threads; each
/// config writes to <root>/<file stem>, ignoring its own output key so that
/// directories never collide.
std::vector<SweepEntry> sweep(const std::filesystem::path& dir, int jobs);

}  // namespace subfp
