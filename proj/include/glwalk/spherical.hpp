#pragma once

#include <cstdint>

#include "glwalk/accum.hpp"
#include "glwalk/haar.hpp"
#include "glwalk/matrix_core.hpp"
#include "glwalk/types.hpp"

// Spherical function and moment-function evaluation by Monte Carlo averaging
// over the compact group.  Everything biinvariant depends on a group element
// only through the positive matrix gg* (and hence only on the chamber point
// of its log singular spectrum), so the evaluators cache gg* and its log
// determinant once and stream Haar rotations against it.

namespace glwalk {

// Half-sum weight vector: rho_l = (d/2)(n + 1 - 2l), d the real dimension of
// the field.
Vector rho(Field field, int n);

// Chamber points are weakly descending finite real vectors.
void check_chamber(const Vector& x);

// gg* of the canonical representative diag(e^{x/2}) of a chamber point.
RealMatrix chamber_gram(const Vector& x);

// Log-minor profile f(k): f_1 = ln det_1(k* gg* k), f_r = ln det_r - ln
// det_{r-1} of the leading minors.  The minors are read off a Householder QR
// of F k, where the stored factor F satisfies F* F = gg*: working on the
// half-power factor squares-roots the condition number, so spectra spread
// over ~70 nats stay resolvable where forming k* gg* k would already fail to
// factor.  The full sum telescopes to ln det(gg*), which is unitarily
// invariant; the evaluator computes it once per g, making the per-sample sum
// a bit-exact constant.
template <typename Scalar>
class ProfileSampler {
 public:
  ProfileSampler(Matrix<Scalar> factor, double log_det)
      : factor_(std::move(factor)), log_det_(log_det) {}

  // From a chamber point: F = diag(e^{x/2}), log det = sum of coordinates,
  // no exp/log round trip.
  static ProfileSampler from_chamber(const Vector& x) {
    check_chamber(x);
    Matrix<Scalar> factor =
        (x / 2.0).array().exp().matrix().template cast<Scalar>().asDiagonal();
    return ProfileSampler(std::move(factor), x.sum());
  }

  // From an explicit group element: F = sigma u* with g = u sigma v*, log det
  // from the singular spectrum.
  static ProfileSampler from_group_element(const Matrix<Scalar>& g);

  int n() const { return static_cast<int>(factor_.rows()); }
  double log_det() const { return log_det_; }

  Vector profile(const Matrix<Scalar>& k) const;

 private:
  Matrix<Scalar> factor_;
  double log_det_;
};

// Spec op log_minor_profile(g, k) for a single rotation.
template <typename Scalar>
Vector log_minor_profile(const Matrix<Scalar>& g, const Matrix<Scalar>& k) {
  return ProfileSampler<Scalar>::from_group_element(g).profile(k);
}

// phi_{i rho + lambda}(g) = E_k[ exp(i lambda . f(k)) ] for real lambda.
MCEstimateC spherical_fn(Field field, const Vector& chamber, const Vector& lambda,
                         std::int64_t samples, Seed seed, int partitions = 1);
MCEstimateC spherical_fn(const RealMatrix& g, const Vector& lambda, std::int64_t samples,
                         Seed seed, int partitions = 1);
MCEstimateC spherical_fn(const ComplexMatrix& g, const Vector& lambda, std::int64_t samples,
                         Seed seed, int partitions = 1);

// Moment function m_l(g) = E_k[ prod_r f_r(k)^{l_r} ].
MCEstimate moment_fn(Field field, const Vector& chamber, const Eigen::VectorXi& l,
                     std::int64_t samples, Seed seed, int partitions = 1);
MCEstimate moment_fn(const RealMatrix& g, const Eigen::VectorXi& l, std::int64_t samples,
                     Seed seed, int partitions = 1);
MCEstimate moment_fn(const ComplexMatrix& g, const Eigen::VectorXi& l, std::int64_t samples,
                     Seed seed, int partitions = 1);

// One shared-sample pass producing the drift vector m1, second moments m2
// and covariance sigma2 = m2 - m1 m1^T (the identity holds entrywise for the
// stored values; sigma2 is the biased sample covariance of the profiles, so
// it is positive semidefinite up to roundoff).
struct MomentSummary {
  Vector m1, m1_se;
  RealMatrix m2, m2_se;
  RealMatrix sigma2, sigma2_se;
  // The per-sample profile sum telescopes to ln det(gg*) identically (the
  // cumulative minor logs cancel pairwise), so the sum statistic is a
  // constant with zero variance; kept alongside the entrywise m1 whose
  // reconstruction of the same sum carries ordinary roundoff.
  double log_det = 0.0;
  MCEstimate sum_identity;
  std::int64_t samples = 0;
};

MomentSummary moment_summary(Field field, const Vector& chamber, std::int64_t samples,
                             Seed seed, int partitions = 1);
MomentSummary moment_summary(const RealMatrix& g, std::int64_t samples, Seed seed,
                             int partitions = 1);
MomentSummary moment_summary(const ComplexMatrix& g, std::int64_t samples, Seed seed,
                             int partitions = 1);

}  // namespace glwalk
