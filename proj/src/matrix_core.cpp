#include "glwalk/matrix_core.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "glwalk/haar.hpp"

namespace glwalk {

namespace {

template <typename Scalar>
Vector principal_minor_logs_impl(const Matrix<Scalar>& p) {
  const Eigen::Index n = p.rows();
  if (n == 0 || p.cols() != n) throw SpecError("principal_minor_logs: matrix must be square and non-empty");
  Eigen::LLT<Matrix<Scalar>> llt(p);
  if (llt.info() != Eigen::Success)
    throw FactorizationFailure("principal_minor_logs: Cholesky failed (input not positive definite)");
  Matrix<Scalar> l = llt.matrixL();
  Vector out(n);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double piv = std::real(l(j, j));
    if (!(piv > 0.0) || !std::isfinite(piv))
      throw FactorizationFailure("principal_minor_logs: nonpositive Cholesky pivot");
    acc += 2.0 * std::log(piv);
    out[j] = acc;
  }
  return out;
}

template <typename Scalar>
Vector singular_log_spectrum_impl(const Matrix<Scalar>& g) {
  Eigen::JacobiSVD<Matrix<Scalar>> svd(g);
  Vector sv = svd.singularValues();
  if (sv.size() == 0) throw SpecError("singular_log_spectrum: empty matrix");
  if (!(sv[sv.size() - 1] > kDetFloor)) {
    std::ostringstream msg;
    msg << "singular_log_spectrum: smallest singular value " << sv[sv.size() - 1]
        << " at or below the determinant floor";
    throw SingularInput(msg.str());
  }
  return sv.array().log();
}

bool next_subset(std::vector<int>& idx, int n) {
  const int r = static_cast<int>(idx.size());
  for (int i = r - 1; i >= 0; --i) {
    if (idx[static_cast<std::size_t>(i)] < n - r + i) {
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < r; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

template <typename Scalar>
std::vector<MinorCoefficient> minor_coefficients_impl(const Matrix<Scalar>& u, int r) {
  const int n = static_cast<int>(u.rows());
  if (u.cols() != n) throw SpecError("minor_coefficients: matrix must be square");
  if (r < 1 || r > n) throw SpecError("minor_coefficients: order r out of range");
  std::vector<MinorCoefficient> out;
  std::vector<int> idx(static_cast<std::size_t>(r));
  std::iota(idx.begin(), idx.end(), 0);
  do {
    // Rows I, first r columns of u; the leading r x r block of u* P_I u is
    // exactly W* W for this W.
    Matrix<Scalar> w(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) w(i, j) = u(idx[static_cast<std::size_t>(i)], j);
    Matrix<Scalar> m = w.adjoint() * w;
    double c = std::real(Eigen::PartialPivLU<Matrix<Scalar>>(m).determinant());
    if (c < 0.0 && c >= -kCoefTol) c = 0.0;  // roundoff from the Hermitian product
    out.push_back(MinorCoefficient{idx, c});
  } while (next_subset(idx, n));
  return out;
}

template <typename Scalar>
std::pair<double, double> block_det_pair_impl(const Matrix<Scalar>& u, int r) {
  const int n = static_cast<int>(u.rows());
  if (u.cols() != n) throw SpecError("block_det_pair: matrix must be square");
  if (r < 1 || r >= n) throw SpecError("block_det_pair: block split r out of range");
  Matrix<Scalar> top = u.topLeftCorner(r, r);
  Matrix<Scalar> bottom = u.bottomRightCorner(n - r, n - r);
  const double d1 = std::abs(Eigen::PartialPivLU<Matrix<Scalar>>(top).determinant());
  const double d2 = std::abs(Eigen::PartialPivLU<Matrix<Scalar>>(bottom).determinant());
  return {d1, d2};
}

// (I - y* y)^{1/2} for a row vector y with ||y|| <= 1: rank-one update of the
// identity, eigenvalue sqrt(1 - ||y||^2) along y*.
template <typename Scalar>
Matrix<Scalar> contraction_sqrt(const Eigen::Matrix<Scalar, 1, Eigen::Dynamic>& y) {
  const Eigen::Index r = y.cols();
  const double s = y.squaredNorm();
  Matrix<Scalar> m = Matrix<Scalar>::Identity(r, r);
  if (s > 0.0) {
    const double root = std::sqrt(std::max(0.0, 1.0 - s));
    m += ((root - 1.0) / s) * (y.adjoint() * y);
  }
  return m;
}

template <typename Scalar>
std::pair<double, double> stacked_det_check_impl(const Matrix<Scalar>& rows) {
  const Eigen::Index r = rows.rows();
  if (rows.cols() != r) throw SpecError("stacked_det_check: need r rows of length r");
  for (Eigen::Index j = 0; j < r; ++j) {
    if (rows.row(j).norm() > 1.0 + 1e-12)
      throw SpecError("stacked_det_check: row outside the unit ball");
  }
  Matrix<Scalar> p(r, r);
  Matrix<Scalar> chain = Matrix<Scalar>::Identity(r, r);  // product of sqrt factors so far
  for (Eigen::Index j = 0; j < r; ++j) {
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> y = rows.row(j);
    p.row(j) = y * chain;
    chain = contraction_sqrt<Scalar>(y) * chain;
  }
  const double d1 = std::abs(Eigen::PartialPivLU<Matrix<Scalar>>(p).determinant());
  const double d2 = std::abs(Eigen::PartialPivLU<Matrix<Scalar>>(Matrix<Scalar>(rows)).determinant());
  return {d1, d2};
}

}  // namespace

Vector principal_minor_logs(const RealMatrix& p) { return principal_minor_logs_impl(p); }
Vector principal_minor_logs(const ComplexMatrix& p) { return principal_minor_logs_impl(p); }

Vector singular_log_spectrum(const RealMatrix& g) { return singular_log_spectrum_impl(g); }
Vector singular_log_spectrum(const ComplexMatrix& g) { return singular_log_spectrum_impl(g); }

std::vector<MinorCoefficient> minor_coefficients(const RealMatrix& u, int r) {
  return minor_coefficients_impl(u, r);
}
std::vector<MinorCoefficient> minor_coefficients(const ComplexMatrix& u, int r) {
  return minor_coefficients_impl(u, r);
}

std::pair<double, double> block_det_pair(const RealMatrix& u, int r) {
  return block_det_pair_impl(u, r);
}
std::pair<double, double> block_det_pair(const ComplexMatrix& u, int r) {
  return block_det_pair_impl(u, r);
}

std::pair<double, double> det_identity_check(const Vector& x) {
  const int n = static_cast<int>(x.size());
  if (n < 1) throw SpecError("det_identity_check: empty input");
  RealMatrix a(n, n);
  for (int j = 0; j < n; ++j) {
    // pi_j transposes indices 0 and j; entry (r, j) sums the first r+1
    // permuted coordinates.
    double acc = 0.0;
    for (int l = 0; l < n; ++l) {
      int il = l;
      if (l == 0) il = j;
      else if (l == j) il = 0;
      acc += x[il];
      a(l, j) = acc;
    }
  }
  const double lhs = a.determinant();
  double rhs = x.sum();
  for (int j = 1; j < n; ++j) rhs *= x[0] - x[j];
  return {lhs, rhs};
}

std::pair<double, double> stacked_det_check(const RealMatrix& rows) {
  return stacked_det_check_impl(rows);
}
std::pair<double, double> stacked_det_check(const ComplexMatrix& rows) {
  return stacked_det_check_impl(rows);
}

double log_minor_independence_check(const Vector& a) {
  const int n = static_cast<int>(a.size());
  if (n < 1) throw SpecError("log_minor_independence_check: empty input");
  RealMatrix d = a.array().exp().matrix().asDiagonal();
  RealMatrix rows(n, n);
  for (int j = 0; j < n; ++j) {
    RealMatrix k = RealMatrix::Identity(n, n);
    if (j > 0) {
      k(0, 0) = 0.0; k(j, j) = 0.0;
      k(0, j) = 1.0; k(j, 0) = 1.0;
    }
    RealMatrix m = k.transpose() * d * k;
    rows.col(j) = principal_minor_logs(m);
  }
  return rows.determinant();
}

NegMomentResult block_det_neg_moment(Field field, int n, int r, double eps,
                                     std::int64_t samples, Seed seed, int partitions) {
  if (n < 1 || r < 1 || r > n) throw SpecError("block_det_neg_moment: invalid (n, r)");
  if (!(eps >= 0.0 && eps < 0.5)) throw SpecError("block_det_neg_moment: eps must lie in [0, 1/2)");
  struct Chunk {
    Welford<double> acc;
    std::int64_t floored = 0;
  };
  auto run = [&](auto scalar_tag) {
    using Scalar = decltype(scalar_tag);
    return run_partitioned<Chunk>(samples, partitions, seed, [&](int, std::int64_t count, Seed s) {
      Chunk c;
      Rng rng = make_rng(s);
      for (std::int64_t i = 0; i < count; ++i) {
        Matrix<Scalar> k = sample_haar<Scalar>(n, rng);
        if (r == n) {
          // |det k| = 1 for unitary k: the integrand is identically 1.
          c.acc.push(1.0);
          continue;
        }
        Matrix<Scalar> blk = k.topLeftCorner(r, r);
        const double d = std::abs(Eigen::PartialPivLU<Matrix<Scalar>>(blk).determinant());
        if (d < kDetFloor) {
          ++c.floored;
          continue;
        }
        c.acc.push(std::pow(d, -2.0 * eps));
      }
      return c;
    });
  };
  std::vector<Chunk> chunks = field == Field::Real ? run(double{})
                                                   : run(std::complex<double>{});
  NegMomentResult out;
  Welford<double> total;
  for (const auto& c : chunks) {
    total.merge(c.acc);
    out.below_floor += c.floored;
  }
  out.estimate = total.estimate();
  return out;
}

double unitary_defect(const RealMatrix& u) {
  return (u.transpose() * u - RealMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}
double unitary_defect(const ComplexMatrix& u) {
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace glwalk
