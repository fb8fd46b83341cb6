#include "glwalk/walk.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include "glwalk/accum.hpp"

namespace glwalk {

namespace {

std::vector<std::vector<int>> subsets_of_size(int n, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) cur[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(cur);
    int i = r - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - r + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < r; ++j)
      cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

template <typename Scalar>
Matrix<Scalar> compound_matrix(const Matrix<Scalar>& x,
                               const std::vector<std::vector<int>>& subs) {
  const int m = static_cast<int>(subs.size());
  const int r = static_cast<int>(subs[0].size());
  Matrix<Scalar> out(m, m);
  Matrix<Scalar> block(r, r);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
          block(a, b) = x(subs[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)],
                          subs[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)]);
      out(i, j) = block.determinant();
    }
  }
  return out;
}

template <typename Scalar>
double log_abs_det(const Matrix<Scalar>& x) {
  Eigen::PartialPivLU<Matrix<Scalar>> lu(x);
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double d = std::abs(lu.matrixLU()(i, i));
    if (!(d > 0.0) || !std::isfinite(d))
      throw SingularInput("walk step: singular or non-finite step matrix");
    s += std::log(d);
  }
  return s;
}

template <typename Scalar>
struct CompoundWalk {
  int n = 0;
  std::int64_t steps = 0;
  std::vector<std::vector<std::vector<int>>> subs;  // r = 2..n-1
  std::vector<Matrix<Scalar>> comp;                 // rescaled r-th compounds, r = 1..n-1
  std::vector<double> shift;                        // accumulated log rescales
  double logdet = 0.0;                              // sum of ln|det X_i|, exact

  explicit CompoundWalk(int n_in) : n(n_in) {
    for (int r = 2; r < n; ++r) subs.push_back(subsets_of_size(n, r));
    for (int r = 1; r < n; ++r) {
      const auto m = static_cast<Eigen::Index>(
          r == 1 ? n : static_cast<int>(subs[static_cast<std::size_t>(r - 2)].size()));
      comp.push_back(Matrix<Scalar>::Identity(m, m));
      shift.push_back(0.0);
    }
  }

  void step(const Matrix<Scalar>& x) {
    ++steps;
    logdet += log_abs_det(x);
    for (int r = 1; r < n; ++r) {
      auto& m = comp[static_cast<std::size_t>(r - 1)];
      if (r == 1) {
        m = (x * m).eval();
      } else {
        m = (compound_matrix(x, subs[static_cast<std::size_t>(r - 2)]) * m).eval();
      }
      const double s = m.cwiseAbs().maxCoeff();
      if (!(s > 0.0) || !std::isfinite(s))
        throw NumericalBlowup("walk: compound product degenerated at step " +
                              std::to_string(steps));
      m /= Scalar(s);
      shift[static_cast<std::size_t>(r - 1)] += std::log(s);
    }
  }

  // x_r(S_k) = 2 (p_r - p_{r-1}) with p_r = ln(sigma_1...sigma_r), p_n exact.
  Vector chamber() const {
    Vector p(n + 1);
    p[0] = 0.0;
    for (int r = 1; r < n; ++r) {
      Eigen::JacobiSVD<Matrix<Scalar>> svd(comp[static_cast<std::size_t>(r - 1)]);
      const double top = svd.singularValues()(0);
      if (!(top > 0.0) || !std::isfinite(top))
        throw NumericalBlowup("walk: compound lost its leading singular value");
      p[r] = shift[static_cast<std::size_t>(r - 1)] + std::log(top);
    }
    p[n] = logdet;
    Vector x(n);
    for (int r = 0; r < n; ++r) x[r] = 2.0 * (p[r + 1] - p[r]);
    std::sort(x.data(), x.data() + n, std::greater<double>());
    return x;
  }
};

template <typename Scalar>
Matrix<Scalar> sample_step(const BiinvariantMeasure& nu, Rng& rng) {
  Vector x = sample_chamber(nu, rng);
  return group_element_from_chamber<Scalar>(x, rng);
}

void check_checkpoints(const std::vector<std::int64_t>& cps) {
  if (cps.empty()) throw SpecError("walk: need at least one checkpoint");
  std::int64_t prev = 0;
  for (auto c : cps) {
    if (c <= prev) throw SpecError("walk: checkpoints must be strictly increasing and positive");
    prev = c;
  }
}

template <typename Scalar>
WalkTrajectory run_walk_impl(const BiinvariantMeasure& nu,
                             const std::vector<std::int64_t>& cps, Seed seed) {
  WalkTrajectory out;
  out.checkpoints = cps;
  CompoundWalk<Scalar> w(nu.n);
  Rng rng = make_rng(seed);
  for (std::int64_t c : cps) {
    while (w.steps < c) w.step(sample_step<Scalar>(nu, rng));
    out.chambers.push_back(w.chamber());
    out.chamber_sums.push_back(2.0 * w.logdet);
  }
  return out;
}

template <typename Scalar>
WalkTrajectory run_walk_reference_impl(const BiinvariantMeasure& nu,
                                       const std::vector<std::int64_t>& cps, Seed seed) {
  WalkTrajectory out;
  out.checkpoints = cps;
  Matrix<Scalar> prod = Matrix<Scalar>::Identity(nu.n, nu.n);
  double shift = 0.0, logdet = 0.0;
  std::int64_t steps = 0;
  Rng rng = make_rng(seed);
  for (std::int64_t c : cps) {
    while (steps < c) {
      Matrix<Scalar> x = sample_step<Scalar>(nu, rng);
      logdet += log_abs_det(x);
      prod = (x * prod).eval();
      const double s = prod.cwiseAbs().maxCoeff();
      if (!(s > 0.0) || !std::isfinite(s))
        throw NumericalBlowup("reference walk: product degenerated at step " +
                              std::to_string(steps + 1));
      prod /= Scalar(s);
      shift += std::log(s);
      ++steps;
    }
    Eigen::JacobiSVD<Matrix<Scalar>> svd(prod);
    Vector x(nu.n);
    for (int r = 0; r < nu.n; ++r) {
      const double sv = svd.singularValues()(r);
      if (!(sv > 0.0))
        throw NumericalBlowup("reference walk: singular value underflow at checkpoint " +
                              std::to_string(c));
      x[r] = 2.0 * (shift + std::log(sv));
    }
    out.chambers.push_back(x);
    out.chamber_sums.push_back(2.0 * logdet);
  }
  return out;
}

}  // namespace

WalkTrajectory run_walk(const BiinvariantMeasure& nu, std::vector<std::int64_t> checkpoints,
                        Seed seed) {
  check_checkpoints(checkpoints);
  return nu.field == Field::Real
             ? run_walk_impl<double>(nu, checkpoints, seed)
             : run_walk_impl<std::complex<double>>(nu, checkpoints, seed);
}

WalkTrajectory run_walk_reference(const BiinvariantMeasure& nu,
                                  std::vector<std::int64_t> checkpoints, Seed seed) {
  check_checkpoints(checkpoints);
  return nu.field == Field::Real
             ? run_walk_reference_impl<double>(nu, checkpoints, seed)
             : run_walk_reference_impl<std::complex<double>>(nu, checkpoints, seed);
}

namespace {

template <typename Scalar>
void run_trials(const BiinvariantMeasure& nu, std::int64_t k, std::int64_t lo, std::int64_t hi,
                Seed trials_seed, const Vector& m1, RealMatrix& t_values) {
  const double rk = std::sqrt(static_cast<double>(k));
  for (std::int64_t t = lo; t < hi; ++t) {
    CompoundWalk<Scalar> w(nu.n);
    Rng rng = make_rng(derive(trials_seed, static_cast<std::uint64_t>(t)));
    for (std::int64_t s = 0; s < k; ++s) w.step(sample_step<Scalar>(nu, rng));
    t_values.row(t) = ((w.chamber() - static_cast<double>(k) * m1) / rk).transpose();
  }
}

}  // namespace

CltSample clt_ensemble(const BiinvariantMeasure& nu, std::int64_t k, std::int64_t trials,
                       Seed seed, double statistic_tol, int partitions) {
  if (k < 1) throw SpecError("clt_ensemble: k must be positive");
  if (trials < 2) throw SpecError("clt_ensemble: need at least 2 trials");
  if (!(statistic_tol > 0.0)) throw SpecError("clt_ensemble: statistic_tol must be positive");

  // Size the moment measurement so the centering bias k * se(m1) stays below
  // statistic_tol * sqrt(k) on every coordinate.  Exact point mixtures only
  // have the inner Haar layer to grow; continuous mixtures keep a small inner
  // count per chamber draw and grow the number of i.i.d. draws, which is the
  // layer the aggregate standard error actually scales with.
  const Seed pilot_seed = derive(seed, salt::kPilot);
  const int parts = std::max(1, partitions);
  const std::int64_t pilot_outer = 2048, pilot_inner = 4;
  MeasureMoments moments = measure_moments(nu, pilot_outer, pilot_inner, pilot_seed, parts);
  if (moments.exact_outer)
    moments = measure_moments(nu, pilot_outer, 4096, pilot_seed, parts);
  const double target = statistic_tol / std::sqrt(static_cast<double>(k));
  const double se0 = moments.m1_se.maxCoeff();
  if (se0 > target) {
    // Variance scales as 1/samples along the grown layer; 1.15 covers pilot
    // noise in se0 itself.
    const double factor = 1.15 * (se0 / target) * (se0 / target);
    const auto scale = [factor](std::int64_t base, std::int64_t cap) {
      const double v = static_cast<double>(base) * factor;
      return std::min(cap, static_cast<std::int64_t>(std::ceil(v)));
    };
    moments = moments.exact_outer
                  ? measure_moments(nu, pilot_outer, scale(4096, std::int64_t{1} << 26), pilot_seed,
                                    parts)
                  : measure_moments(nu, scale(pilot_outer, std::int64_t{1} << 26), pilot_inner,
                                    pilot_seed, parts);
  }

  CltSample out;
  out.k = k;
  out.statistic_tol = statistic_tol;
  out.nu_moments = moments;
  out.t_values.resize(trials, nu.n);

  const Seed trials_seed = derive(seed, salt::kWalkTrials);
  const Vector m1 = moments.m1;
  auto sizes = partition_sizes(trials, parts);
  if (parts == 1) {
    if (nu.field == Field::Real)
      run_trials<double>(nu, k, 0, trials, trials_seed, m1, out.t_values);
    else
      run_trials<std::complex<double>>(nu, k, 0, trials, trials_seed, m1, out.t_values);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(parts));
    std::int64_t lo = 0;
    for (int p = 0; p < parts; ++p) {
      const std::int64_t hi = lo + sizes[static_cast<std::size_t>(p)];
      pool.emplace_back([&, p, lo, hi] {
        try {
          if (nu.field == Field::Real)
            run_trials<double>(nu, k, lo, hi, trials_seed, m1, out.t_values);
          else
            run_trials<std::complex<double>>(nu, k, lo, hi, trials_seed, m1, out.t_values);
        } catch (...) {
          errors[static_cast<std::size_t>(p)] = std::current_exception();
        }
      });
      lo = hi;
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return out;
}

GaussianReport gaussian_compare(const RealMatrix& t_values, const RealMatrix& sigma2) {
  const auto N = t_values.rows();
  const int n = static_cast<int>(t_values.cols());
  if (N < 3) throw SpecError("gaussian_compare: need at least 3 rows");
  if (sigma2.rows() != n || sigma2.cols() != n)
    throw SpecError("gaussian_compare: covariance dimension mismatch");

  GaussianReport rep;
  rep.mean = t_values.colwise().mean().transpose();
  rep.mean_norm = rep.mean.norm();
  RealMatrix centered = t_values.rowwise() - rep.mean.transpose();
  rep.sample_cov = centered.transpose() * centered / static_cast<double>(N - 1);
  const double denom = sigma2.norm();
  const double num = (rep.sample_cov - sigma2).norm();
  rep.cov_frobenius_rel_err = denom > 0.0 ? num / denom : num;

  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sigma2);
  if (es.info() != Eigen::Success)
    throw FactorizationFailure("gaussian_compare: eigendecomposition failed");
  const Vector ev = es.eigenvalues();
  const double cut = kRankRelTol * std::max(ev[n - 1], 0.0);
  std::vector<int> kept;
  for (int i = 0; i < n; ++i)
    if (ev[i] > cut && ev[i] > 0.0) kept.push_back(i);
  rep.cov_rank = static_cast<int>(kept.size());
  rep.degenerate_covariance = rep.cov_rank < n;

  // KS and Mardia run on sample-mean-centered projections: T carries a
  // deterministic O(1/sqrt(k)) location offset (tested separately via
  // mean_norm) that would swamp any large-trial location-sensitive test.
  // Scale and directions stay pinned to the reference covariance.
  if (!kept.empty()) {
    RealMatrix z(N, static_cast<int>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) {
      const Vector dir = es.eigenvectors().col(kept[j]);
      z.col(static_cast<Eigen::Index>(j)) = (centered * dir) / std::sqrt(ev[kept[j]]);
      std::vector<double> proj(z.col(static_cast<Eigen::Index>(j)).data(),
                               z.col(static_cast<Eigen::Index>(j)).data() + N);
      const double d = ks_statistic_normal(std::move(proj), 0.0, 1.0);
      rep.ks_statistics.push_back(d);
      rep.ks_p_values.push_back(ks_p_value(d, N));
    }
    rep.mardia = mardia_statistics(z);
  }
  return rep;
}

GaussianReport gaussian_compare(const CltSample& sample) {
  return gaussian_compare(sample.t_values, sample.nu_moments.sigma2);
}

}  // namespace glwalk
