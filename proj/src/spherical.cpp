#include "glwalk/spherical.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

namespace glwalk {

Vector rho(Field field, int n) {
  if (n < 1) throw SpecError("rho: n must be positive");
  Vector out(n);
  const double half_d = 0.5 * field_dim(field);
  for (int l = 1; l <= n; ++l) out[l - 1] = half_d * (n + 1 - 2 * l);
  return out;
}

void check_chamber(const Vector& x) {
  if (x.size() < 1) throw SpecError("chamber point must be non-empty");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw SpecError("chamber point has non-finite coordinate");
    if (i > 0 && x[i] > x[i - 1] + 0.0)
      throw SpecError("chamber point coordinates must be descending");
  }
}

RealMatrix chamber_gram(const Vector& x) {
  check_chamber(x);
  return x.array().exp().matrix().asDiagonal();
}

template <typename Scalar>
ProfileSampler<Scalar> ProfileSampler<Scalar>::from_group_element(const Matrix<Scalar>& g) {
  Vector ls = singular_log_spectrum(g);  // also rejects sub-floor spectra
  Eigen::JacobiSVD<Matrix<Scalar>> svd(g, Eigen::ComputeFullU);
  Matrix<Scalar> factor =
      svd.singularValues().template cast<Scalar>().asDiagonal() * svd.matrixU().adjoint();
  return ProfileSampler(std::move(factor), 2.0 * ls.sum());
}

template <typename Scalar>
Vector ProfileSampler<Scalar>::profile(const Matrix<Scalar>& k) const {
  const int n = this->n();
  Vector f(n);
  if (n == 1) {
    f[0] = log_det_;
    return f;
  }
  // Householder QR without pivoting is nested in the leading columns, so
  // det_r(k* gg* k) = |R_11 ... R_rr|^2 for every r from a single pass.
  Eigen::HouseholderQR<Matrix<Scalar>> qr(Matrix<Scalar>(factor_ * k));
  const auto rdiag = qr.matrixQR().diagonal();
  double prev = 0.0;
  for (int r = 0; r < n - 1; ++r) {
    const double piv = std::abs(rdiag[r]);
    if (!(piv > 0.0) || !std::isfinite(piv))
      throw FactorizationFailure("log-minor profile: vanishing QR pivot");
    const double cur = prev + 2.0 * std::log(piv);
    f[r] = cur - prev;  // = 2 log piv, written this way to mirror the telescoping
    prev = cur;
  }
  f[n - 1] = log_det_ - prev;  // top minor is the unitary-invariant determinant
  return f;
}

template class ProfileSampler<double>;
template class ProfileSampler<std::complex<double>>;

namespace {

// Shared Monte Carlo skeleton: stream Haar samples, hand each profile to the
// chunk body, merge chunk accumulators in partition order.
template <typename Scalar, typename Chunk, typename Body>
std::vector<Chunk> stream_profiles(const ProfileSampler<Scalar>& ps, std::int64_t samples,
                                   Seed seed, int partitions, Body&& body) {
  return run_partitioned<Chunk>(samples, partitions, seed,
                                [&](int, std::int64_t count, Seed s) {
                                  Chunk c;
                                  Rng rng = make_rng(s);
                                  for (std::int64_t i = 0; i < count; ++i) {
                                    Matrix<Scalar> k = sample_haar<Scalar>(ps.n(), rng);
                                    body(c, ps.profile(k));
                                  }
                                  return c;
                                });
}

template <typename Scalar>
MCEstimateC spherical_fn_impl(const ProfileSampler<Scalar>& ps, const Vector& lambda,
                              std::int64_t samples, Seed seed, int partitions) {
  if (lambda.size() != ps.n()) throw SpecError("spherical_fn: lambda dimension mismatch");
  struct Chunk {
    Welford<std::complex<double>> acc;
  };
  auto chunks = stream_profiles<Scalar, Chunk>(
      ps, samples, seed, partitions, [&](Chunk& c, const Vector& f) {
        const double t = lambda.dot(f);
        c.acc.push(std::complex<double>(std::cos(t), std::sin(t)));
      });
  Welford<std::complex<double>> total;
  for (const auto& c : chunks) total.merge(c.acc);
  return total.estimate();
}

template <typename Scalar>
MCEstimate moment_fn_impl(const ProfileSampler<Scalar>& ps, const Eigen::VectorXi& l,
                          std::int64_t samples, Seed seed, int partitions) {
  if (l.size() != ps.n()) throw SpecError("moment_fn: multi-index dimension mismatch");
  for (Eigen::Index i = 0; i < l.size(); ++i)
    if (l[i] < 0) throw SpecError("moment_fn: multi-index entries must be nonnegative");
  struct Chunk {
    Welford<double> acc;
  };
  auto chunks = stream_profiles<Scalar, Chunk>(
      ps, samples, seed, partitions, [&](Chunk& c, const Vector& f) {
        double v = 1.0;
        for (Eigen::Index i = 0; i < l.size(); ++i)
          for (int p = 0; p < l[i]; ++p) v *= f[i];
        c.acc.push(v);
      });
  Welford<double> total;
  for (const auto& c : chunks) total.merge(c.acc);
  return total.estimate();
}

template <typename Scalar>
MomentSummary moment_summary_impl(const ProfileSampler<Scalar>& ps, std::int64_t samples,
                                  Seed seed, int partitions) {
  const int n = ps.n();
  const int np = n * (n + 1) / 2;  // packed upper triangle of the product moments
  struct Chunk {
    VectorWelford f, p;
  };
  auto chunks = stream_profiles<Scalar, Chunk>(
      ps, samples, seed, partitions, [&](Chunk& c, const Vector& f) {
        if (c.f.count() == 0) {
          c.f = VectorWelford(n);
          c.p = VectorWelford(np);
        }
        Vector prod(np);
        int idx = 0;
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) prod[idx++] = f[i] * f[j];
        c.f.push(f);
        c.p.push(prod);
      });
  VectorWelford f_total(n), p_total(np);
  for (const auto& c : chunks) {
    f_total.merge(c.f);
    p_total.merge(c.p);
  }
  MomentSummary out;
  out.samples = f_total.count();
  out.log_det = ps.log_det();
  out.sum_identity = MCEstimate{ps.log_det(), 0.0, f_total.count()};
  out.m1 = f_total.mean();
  out.m1_se = f_total.std_error();
  out.m2.resize(n, n);
  out.m2_se.resize(n, n);
  out.sigma2.resize(n, n);
  out.sigma2_se.resize(n, n);
  const Vector pm = p_total.mean();
  const Vector pse = p_total.std_error();
  int idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      out.m2(i, j) = out.m2(j, i) = pm[idx];
      out.m2_se(i, j) = out.m2_se(j, i) = pse[idx];
      // stored sigma2 satisfies sigma2 = m2 - m1 m1^T entrywise, exactly
      out.sigma2(i, j) = out.sigma2(j, i) = pm[idx] - out.m1[i] * out.m1[j];
      const double d = std::sqrt(pse[idx] * pse[idx] +
                                 out.m1[j] * out.m1[j] * out.m1_se[i] * out.m1_se[i] +
                                 out.m1[i] * out.m1[i] * out.m1_se[j] * out.m1_se[j]);
      out.sigma2_se(i, j) = out.sigma2_se(j, i) = d;
      ++idx;
    }
  }
  return out;
}

}  // namespace

MCEstimateC spherical_fn(Field field, const Vector& chamber, const Vector& lambda,
                         std::int64_t samples, Seed seed, int partitions) {
  if (field == Field::Real)
    return spherical_fn_impl(ProfileSampler<double>::from_chamber(chamber), lambda, samples,
                             seed, partitions);
  return spherical_fn_impl(ProfileSampler<std::complex<double>>::from_chamber(chamber), lambda,
                           samples, seed, partitions);
}
MCEstimateC spherical_fn(const RealMatrix& g, const Vector& lambda, std::int64_t samples,
                         Seed seed, int partitions) {
  return spherical_fn_impl(ProfileSampler<double>::from_group_element(g), lambda, samples, seed,
                           partitions);
}
MCEstimateC spherical_fn(const ComplexMatrix& g, const Vector& lambda, std::int64_t samples,
                         Seed seed, int partitions) {
  return spherical_fn_impl(ProfileSampler<std::complex<double>>::from_group_element(g), lambda,
                           samples, seed, partitions);
}

MCEstimate moment_fn(Field field, const Vector& chamber, const Eigen::VectorXi& l,
                     std::int64_t samples, Seed seed, int partitions) {
  if (field == Field::Real)
    return moment_fn_impl(ProfileSampler<double>::from_chamber(chamber), l, samples, seed,
                          partitions);
  return moment_fn_impl(ProfileSampler<std::complex<double>>::from_chamber(chamber), l, samples,
                        seed, partitions);
}
MCEstimate moment_fn(const RealMatrix& g, const Eigen::VectorXi& l, std::int64_t samples,
                     Seed seed, int partitions) {
  return moment_fn_impl(ProfileSampler<double>::from_group_element(g), l, samples, seed,
                        partitions);
}
MCEstimate moment_fn(const ComplexMatrix& g, const Eigen::VectorXi& l, std::int64_t samples,
                     Seed seed, int partitions) {
  return moment_fn_impl(ProfileSampler<std::complex<double>>::from_group_element(g), l, samples,
                        seed, partitions);
}

MomentSummary moment_summary(Field field, const Vector& chamber, std::int64_t samples,
                             Seed seed, int partitions) {
  if (field == Field::Real)
    return moment_summary_impl(ProfileSampler<double>::from_chamber(chamber), samples, seed,
                               partitions);
  return moment_summary_impl(ProfileSampler<std::complex<double>>::from_chamber(chamber),
                             samples, seed, partitions);
}
MomentSummary moment_summary(const RealMatrix& g, std::int64_t samples, Seed seed,
                             int partitions) {
  return moment_summary_impl(ProfileSampler<double>::from_group_element(g), samples, seed,
                             partitions);
}
MomentSummary moment_summary(const ComplexMatrix& g, std::int64_t samples, Seed seed,
                             int partitions) {
  return moment_summary_impl(ProfileSampler<std::complex<double>>::from_group_element(g),
                             samples, seed, partitions);
}

}  // namespace glwalk
