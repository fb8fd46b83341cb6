#include "glwalk/haar.hpp"

#include <Eigen/QR>
#include <cmath>

namespace glwalk {

namespace {

// Redraw threshold for degenerate Gaussian draws (measure-zero event, but a
// zero diagonal entry of R would leave the phase correction undefined).
constexpr double kQrDiagFloor = 1e-280;

template <typename Scalar>
Matrix<Scalar> haar_from_ginibre(const Matrix<Scalar>& a) {
  Eigen::HouseholderQR<Matrix<Scalar>> qr(a);
  Matrix<Scalar> q = qr.householderQ();
  Matrix<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double mag = std::abs(r(j, j));
    if (mag < kQrDiagFloor) return Matrix<Scalar>();  // signal redraw
    q.col(j) *= r(j, j) / mag;
  }
  return q;
}

}  // namespace

RealMatrix sample_haar_real(int n, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  while (true) {
    RealMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
    RealMatrix q = haar_from_ginibre(a);
    if (q.size() != 0) return q;
  }
}

ComplexMatrix sample_haar_complex(int n, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  while (true) {
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double re = nd(rng), im = nd(rng);
        a(i, j) = std::complex<double>(re * inv_sqrt2, im * inv_sqrt2);
      }
    ComplexMatrix q = haar_from_ginibre(a);
    if (q.size() != 0) return q;
  }
}

}  // namespace glwalk
