// Flat key=value run configuration with a schema version gate.  The same
// struct drives every command; unknown or malformed keys are hard errors so
// a config file never silently half-applies.
#pragma once

#include <cstdint>
#include <string>

#include "fid/catalog.hpp"

namespace fid {

struct Config {
  std::string command;           // list-classes | simulate | target | compare | check
  std::string model = "direct";  // direct | integral | integrated_direct
  std::string mu = "gaussian";
  Params mu_params;
  std::string kernel;            // catalog kernel key; required by integral models
  Params kernel_params;
  std::string check;             // characteristic | polar | pathway | kernels
  int d = 50;
  int replicas = 20;
  double eps = 1e-3;
  bool ar_substitute = true;
  double tol = 0.05;
  std::uint64_t seed = 1;
  int workers = 0;               // 0: use hardware concurrency
  std::string out = "run";
  int grid_points = 201;
};

// Parses "key=value" lines; '#' starts a comment; blank lines ignored.
// Requires schema_version=1.  Duplicate, unknown, or ill-typed keys raise
// invalid_config.
Config parse_config_text(const std::string& text);
Config load_config_file(const std::string& path);

}  // namespace fid
