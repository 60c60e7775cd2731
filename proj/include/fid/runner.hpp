// Command implementations behind the CLI: experiment execution, artifact
// persistence with hashed manifests, comparison reports, and the
// verification fixtures.  All outputs are deterministic functions of
// (config, seed, version); worker count never changes bytes.
#pragma once

#include <string>
#include <vector>

#include "fid/checks.hpp"
#include "fid/config.hpp"

namespace fid {

std::string version_string();

// Text table of the stochastic-integral class catalog, one row per class.
std::string list_classes_text();

// Writes spectrum_NNNN.csv per replica, pooled_cdf.csv, and manifest.json
// into cfg.out.
void cmd_simulate(const Config& cfg);

// Writes target.csv (x, density, cdf) and target_summary.json into cfg.out.
void cmd_target(const Config& cfg);

struct CompareOutcome {
  double ks = 0.0;
  double w1 = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Pooled spectrum of a finished run against a target CSV; writes
// compare_report.json into the run directory.
CompareOutcome cmd_compare(const Config& cfg, const std::string& run_dir,
                           const std::string& target_csv);

// Verification fixture named by cfg.check; writes check_report.json.
CheckReport cmd_check(const Config& cfg);

// Dispatch with error trapping: machine-readable error JSON on stderr and a
// nonzero exit code on failure.  Extra positional arguments feed compare.
int run_command(const Config& cfg, const std::vector<std::string>& positionals = {});

}  // namespace fid
