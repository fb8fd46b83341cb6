#pragma once

#include <utility>
#include <vector>

#include "glwalk/types.hpp"

// Deterministic matrix primitives: log leading principal minors, log singular
// spectra, minor expansion coefficients of conjugated projections, block
// determinants and the determinant identities used by the verification suite.

namespace glwalk {

// ln det of the leading r x r blocks, r = 1..n, via Cholesky (2 * sum of log
// pivots).  Throws FactorizationFailure if p is not numerically positive
// definite.
Vector principal_minor_logs(const RealMatrix& p);
Vector principal_minor_logs(const ComplexMatrix& p);

// ln of the singular values, descending.  Throws SingularInput when the
// smallest singular value falls under the determinant floor.
Vector singular_log_spectrum(const RealMatrix& g);
Vector singular_log_spectrum(const ComplexMatrix& g);

// Expansion coefficient of one r-subset I: c_I(u) = det of the leading r x r
// block of u* P_I u, where P_I projects onto the coordinates in I.
struct MinorCoefficient {
  std::vector<int> subset;  // 0-based, strictly increasing
  double value;
};

// All C(n, r) coefficients in lexicographic subset order.  Values within
// kCoefTol below zero are clamped to 0; larger negatives are left alone so
// verification can catch them.
std::vector<MinorCoefficient> minor_coefficients(const RealMatrix& u, int r);
std::vector<MinorCoefficient> minor_coefficients(const ComplexMatrix& u, int r);

// (|det top-left r x r block|, |det bottom-right (n-r) x (n-r) block|).
// Equal for unitary u; no unitarity is enforced here so corrupted inputs
// surface as a failed comparison, not an exception.
std::pair<double, double> block_det_pair(const RealMatrix& u, int r);
std::pair<double, double> block_det_pair(const ComplexMatrix& u, int r);

// Determinant identity for the matrix with entries sum_{l<=r} x_{pi_j(l)}
// (pi_j transposes 1 and j): returns (determinant, (sum_l x_l) *
// prod_{j>=2} (x_1 - x_j)).
std::pair<double, double> det_identity_check(const Vector& x);

// Stacked-row determinant identity: rows y_1..y_r in the unit ball of F^r.
// Returns (|det P(y_1..y_r)|, |det (y_1; ...; y_r)|) where row j of P is
// y_j (I - y_{j-1}* y_{j-1})^{1/2} ... (I - y_1* y_1)^{1/2}.
std::pair<double, double> stacked_det_check(const RealMatrix& rows);
std::pair<double, double> stacked_det_check(const ComplexMatrix& rows);

// Determinant of the matrix whose (r, j) entry is the r-th log leading minor
// of k_j^T diag(e^a) k_j, with k_j the transposition matrix swapping rows
// 1 and j.  Nonzero iff the log-minor rows are linearly independent.
double log_minor_independence_check(const Vector& a);

// Monte Carlo estimate of the negative moment E[ |det k_r|^(-2 eps) ] over
// Haar-distributed k, where k_r is the top-left r x r block.
struct NegMomentResult {
  MCEstimate estimate;
  std::int64_t below_floor = 0;  // samples with |det k_r| under the det floor
};
NegMomentResult block_det_neg_moment(Field field, int n, int r, double eps,
                                     std::int64_t samples, Seed seed, int partitions = 1);

// Max-norm residual ||u* u - I||_max; the unitarity defect used in tests.
double unitary_defect(const RealMatrix& u);
double unitary_defect(const ComplexMatrix& u);

}  // namespace glwalk
