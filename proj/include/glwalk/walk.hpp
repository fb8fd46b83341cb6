#pragma once

#include <cstdint>
#include <vector>

#include "glwalk/measures.hpp"
#include "glwalk/stats.hpp"
#include "glwalk/types.hpp"

// Biinvariant random walks S_k = X_k ... X_1 with i.i.d. steps from a
// biinvariant measure, tracked through the log singular spectrum.  The
// spectrum is recovered from per-step-rescaled exterior-power (compound)
// products: the top singular value of the r-th compound equals
// sigma_1 ... sigma_r(S_k), which stays relatively accurate for any walk
// length, while ln|det S_k| accumulates exactly step by step.  A direct SVD
// of the formed product (run_walk_reference) loses the small singular values
// once the spectrum spreads past ~37 nats and is kept only for
// well-conditioned short-walk cross-checks.

namespace glwalk {

struct WalkTrajectory {
  std::vector<std::int64_t> checkpoints;
  // Chamber coordinate x(S_k) = 2 ln sigma(S_k), sorted descending.
  std::vector<Vector> chambers;
  // 2 sum_i ln|det X_i| at each checkpoint (exact running accumulation; the
  // coordinates of chambers[j] telescope to this up to rounding).
  std::vector<double> chamber_sums;
};

// checkpoints must be strictly increasing positive step counts.
WalkTrajectory run_walk(const BiinvariantMeasure& nu, std::vector<std::int64_t> checkpoints,
                        Seed seed);
// Same step stream, but an explicitly formed matrix product with one SVD per
// checkpoint.  Cross-check use only (see header comment).
WalkTrajectory run_walk_reference(const BiinvariantMeasure& nu,
                                  std::vector<std::int64_t> checkpoints, Seed seed);

struct CltSample {
  std::int64_t k = 0;
  // trials x n; row t is T = (x(S_k) - k m1) / sqrt(k) for an independent walk.
  RealMatrix t_values;
  // Moments of the step measure used for centering (m1) and as the target
  // covariance (sigma2), measured to the requested precision.
  MeasureMoments nu_moments;
  double statistic_tol = 0.0;
};

// Runs `trials` independent walks of length k.  A pilot moment run sizes the
// moment measurement so that se(m1_j) <= statistic_tol / sqrt(k) (capped;
// achieved errors are in nu_moments.m1_se).  Trial t always uses the stream
// derive(derive(seed, kWalkTrials), t), so results do not depend on
// `partitions`, which only sets the number of worker threads.
CltSample clt_ensemble(const BiinvariantMeasure& nu, std::int64_t k, std::int64_t trials,
                       Seed seed, double statistic_tol = 0.01, int partitions = 1);

struct GaussianReport {
  Vector mean;
  double mean_norm = 0.0;
  RealMatrix sample_cov;
  // ||sample_cov - sigma2||_F / ||sigma2||_F; if ||sigma2||_F = 0 the
  // numerator is reported unnormalized.
  double cov_frobenius_rel_err = 0.0;
  // Spectrum of the target sigma2; directions with eigenvalue
  // > kRankRelTol * max are retained for the per-direction tests.
  int cov_rank = 0;
  bool degenerate_covariance = false;
  // One KS test per retained eigendirection, on the sample-mean-centered
  // projection whitened by the reference eigenvalue (shape test; location
  // is reported separately through mean_norm).
  std::vector<double> ks_statistics;
  std::vector<double> ks_p_values;
  MardiaResult mardia;  // on the centered, whitened retained coordinates
};

GaussianReport gaussian_compare(const RealMatrix& t_values, const RealMatrix& sigma2);
GaussianReport gaussian_compare(const CltSample& sample);

}  // namespace glwalk
