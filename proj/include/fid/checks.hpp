// Reusable verification fixtures shared by the command-line `check` command
// and the acceptance suite.  Each returns a report of named rows with the
// measured statistic and its allowance.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fid {

struct CheckRow {
  std::string name;
  double stat = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::string title;
  std::vector<CheckRow> rows;
  bool pass = true;

  // pass when stat <= bound
  void add(std::string name, double stat, double bound);
  // pass when stat > bound (tail probabilities)
  void add_above(std::string name, double stat, double bound);
};

// Characteristic-function identity of the matrix ensemble: empirical
// E exp(i z tr(M A)) against the directional-average prediction, across the
// law catalog, d in {1,2,3}, three probe matrices, |z| <= 3.
CheckReport run_characteristic_matrix(std::uint64_t seed, int samples = 100000);

// Dual-route jump-event rates (radial bands, a direction band, probe-trace
// signs) for three laws and d in {2,5}.
CheckReport run_polar_sets(std::uint64_t seed);

// Spectral equivalence of the two integral-sampling pathways for three
// kernel/driver pairs, by replica permutation.
CheckReport run_pathway_equivalence(std::uint64_t seed, int d = 100,
                                    int replicas = 50);

// Kernel inverse round trips, occupation-time consistency, and moment
// identities against frozen exact values.
CheckReport run_kernel_roundtrips();

}  // namespace fid
