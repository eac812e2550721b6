#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bermudan::lattice {

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  // Subset of {"optimal_not_sure", "sure_not_hereditary", "counter1", "random"}; empty = all.
  std::vector<std::string> fixtures;
  // Replace the Doob martingale by a 1e-3 perturbation in the sure-optimality checks.
  bool fault_inject = false;
  std::size_t random_lattices = 100;
  std::size_t random_horizon = 4;
  std::uint64_t seed = 20240901;
  std::size_t counter1_max_n = 50;
  double tolerance = 1e-10;
};

// Runs the exact duality-theory property suite on the fixture lattices.
std::vector<PropertyResult> run_lattice_verification(const VerifyOptions& options);

}  // namespace bermudan::lattice
