#pragma once

#include <cstdint>
#include <vector>

#include "glwalk/spherical.hpp"
#include "glwalk/types.hpp"

// Empirical oscillation ratios of the spherical function at the identity,
// for a fixed group element g with chamber coordinate x = 2 ln sigma(g):
//
//   ratio2(lambda) = |phi_{i rho + lambda}(g) - e^{i lambda . m1(g)}| / |lambda|^2
//   ratio1(lambda) = |phi_{i rho - lambda}(g) - e^{i lambda . x}|      / |lambda|
//
// (ratio1 is evaluated through its conjugate |phi_{i rho + lambda} -
// e^{-i lambda . x}|, which shares samples with ratio2.)
// m1(g) is measured from the same Monte Carlo samples, and both numerators
// are accumulated per sample in the shifted form e^{it} - 1 (- it), so the
// ratios stay resolvable far below the naive |phi - e^{..}| noise floor of
// O(1/sqrt(N)) as |lambda| -> 0.

namespace glwalk {

struct OscPoint {
  Vector lambda;
  double norm = 0.0;
  double ratio2 = 0.0, ratio2_se = 0.0;
  double ratio1 = 0.0, ratio1_se = 0.0;
};

struct OscillationScan {
  Field field = Field::Real;
  Vector chamber;
  std::vector<OscPoint> points;
  double sup_ratio2 = 0.0, sup_ratio2_se = 0.0;
  double sup_ratio1 = 0.0, sup_ratio1_se = 0.0;
  // Smallest ratio2 over the lowest-norm shell of the grid: stays comparable
  // to the sup when the quadratic scaling law holds down to lambda -> 0.
  double inf_ratio2_smallest_shell = 0.0;
  Vector m1_hat;
  Vector m1_se;
  std::int64_t samples = 0;
};

// Log-spaced norms in [lo, hi] crossed with unit directions.  For n = 2 the
// directions are the angles pi (j + 1/2) / count, which avoids the diagonal
// direction where both numerators vanish identically; for n >= 3 they are
// seeded uniform unit vectors (salted with kDirections).
std::vector<Vector> lambda_log_grid(int n, double lo, double hi, int norms, int directions,
                                    Seed seed);

OscillationScan oscillation_scan(Field field, const Vector& chamber,
                                 const std::vector<Vector>& lambdas, std::int64_t samples,
                                 Seed seed, int partitions = 1);

}  // namespace glwalk
