#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glwalk/types.hpp"

// Randomized verification of the deterministic matrix identities backing the
// spherical-function machinery, plus the Monte Carlo integrability check for
// negative moments of block determinants.  Each check draws fresh random
// instances and reports its worst residual; corruption injection perturbs
// one instance to prove the checks can actually fail.

namespace glwalk {

struct LemmaCheck {
  std::string name;
  std::int64_t instances = 0;
  std::int64_t failures = 0;
  double worst_residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<LemmaCheck> checks;
  bool all_passed = false;
};

struct VerifyOptions {
  std::int64_t instances = 1000;     // random instances per identity check
  std::int64_t mc_samples = 200000;  // negative-moment Monte Carlo budget
  Seed seed;
  int partitions = 1;
  bool inject_corruption = false;
};

VerifyReport run_verification(const VerifyOptions& opt);

}  // namespace glwalk
