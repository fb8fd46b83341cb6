#include "glwalk/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "glwalk/accum.hpp"
#include "glwalk/haar.hpp"

namespace glwalk {

namespace {

// e^{it} - 1 without cancellation: (-2 sin^2(t/2), sin t).
std::complex<double> expi_m1(double t) {
  const double s = std::sin(0.5 * t);
  return {-2.0 * s * s, std::sin(t)};
}

// e^{it} - 1 - it; the imaginary part loses relative precision for small t
// but its absolute error ~ulp(t) is negligible against the |lambda|^2 scale.
std::complex<double> expi_m1_mt(double t) {
  const double s = std::sin(0.5 * t);
  return {-2.0 * s * s, std::sin(t) - t};
}

struct OscChunk {
  VectorWelford f;                              // profile mean (for m1_hat)
  std::vector<Welford<std::complex<double>>> w;  // e^{it} - 1 - it, per lambda
  std::vector<Welford<std::complex<double>>> v;  // e^{it} - 1, per lambda

  OscChunk() = default;
  OscChunk(int n, std::size_t nl) : f(n), w(nl), v(nl) {}
  void merge(const OscChunk& o) {
    f.merge(o.f);
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i].merge(o.w[i]);
      v[i].merge(o.v[i]);
    }
  }
};

template <typename Scalar>
OscillationScan scan_impl(Field field, const Vector& chamber,
                          const std::vector<Vector>& lambdas, std::int64_t samples, Seed seed,
                          int partitions) {
  const int n = static_cast<int>(chamber.size());
  const std::size_t nl = lambdas.size();
  auto ps = ProfileSampler<Scalar>::from_chamber(chamber);

  auto chunks = run_partitioned<OscChunk>(
      samples, partitions, seed, [&](int, std::int64_t count, Seed s) {
        OscChunk c(n, nl);
        Rng rng = make_rng(s);
        for (std::int64_t i = 0; i < count; ++i) {
          Matrix<Scalar> k = sample_haar<Scalar>(n, rng);
          Vector f = ps.profile(k);
          c.f.push(f);
          for (std::size_t l = 0; l < nl; ++l) {
            const double t = lambdas[l].dot(f);
            c.w[l].push(expi_m1_mt(t));
            c.v[l].push(expi_m1(t));
          }
        }
        return c;
      });
  OscChunk total = std::move(chunks[0]);
  for (std::size_t i = 1; i < chunks.size(); ++i) total.merge(chunks[i]);

  OscillationScan out;
  out.field = field;
  out.chamber = chamber;
  out.samples = samples;
  out.m1_hat = total.f.mean();
  out.m1_se = total.f.std_error();

  double min_norm = std::numeric_limits<double>::infinity();
  for (const auto& l : lambdas) min_norm = std::min(min_norm, l.norm());

  out.points.reserve(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    OscPoint p;
    p.lambda = lambdas[l];
    p.norm = lambdas[l].norm();
    const double n2 = p.norm * p.norm;
    auto w_est = total.w[l].estimate();
    auto v_est = total.v[l].estimate();
    // phi - e^{i t_bar} = mean(e^{it}-1-it) - (e^{i t_bar}-1-i t_bar)
    //                     + i (mean(t) - t_bar); the last term is a rounding
    //                     residue because t_bar uses the same-sample m1_hat.
    const double tbar = lambdas[l].dot(out.m1_hat);
    p.ratio2 = std::abs(w_est.mean - expi_m1_mt(tbar)) / n2;
    p.ratio2_se = w_est.std_error / n2;
    // First-order ratio targets the transform at parameter i*rho - lambda,
    // whose ref phase is e^{+i lambda.x}.  v accumulates e^{+i lambda.f} - 1
    // (parameter i*rho + lambda), and conjugating the whole difference flips
    // the reference to e^{-i lambda.x} without changing the modulus.
    const double s = lambdas[l].dot(chamber);
    p.ratio1 = std::abs(v_est.mean - expi_m1(-s)) / p.norm;
    p.ratio1_se = v_est.std_error / p.norm;
    if (p.ratio2 > out.sup_ratio2) {
      out.sup_ratio2 = p.ratio2;
      out.sup_ratio2_se = p.ratio2_se;
    }
    if (p.ratio1 > out.sup_ratio1) {
      out.sup_ratio1 = p.ratio1;
      out.sup_ratio1_se = p.ratio1_se;
    }
    out.points.push_back(std::move(p));
  }
  double inf2 = std::numeric_limits<double>::infinity();
  for (const auto& p : out.points)
    if (p.norm <= min_norm * (1.0 + 1e-12)) inf2 = std::min(inf2, p.ratio2);
  out.inf_ratio2_smallest_shell = inf2;
  return out;
}

}  // namespace

std::vector<Vector> lambda_log_grid(int n, double lo, double hi, int norms, int directions,
                                    Seed seed) {
  if (n < 1 || norms < 1 || directions < 1)
    throw SpecError("lambda_log_grid: dimensions and counts must be positive");
  if (!(lo > 0.0) || !(hi >= lo)) throw SpecError("lambda_log_grid: need 0 < lo <= hi");

  std::vector<Vector> dirs;
  if (n == 1) {
    dirs.push_back(Vector::Constant(1, 1.0));
  } else if (n == 2) {
    for (int j = 0; j < directions; ++j) {
      const double th = std::numbers::pi * (static_cast<double>(j) + 0.5) /
                        static_cast<double>(directions);
      Vector d(2);
      d << std::cos(th), std::sin(th);
      dirs.push_back(d);
    }
  } else {
    Rng rng = make_rng(derive(seed, salt::kDirections));
    std::normal_distribution<double> nd(0.0, 1.0);
    while (static_cast<int>(dirs.size()) < directions) {
      Vector d(n);
      for (int i = 0; i < n; ++i) d[i] = nd(rng);
      const double len = d.norm();
      if (!(len > 1e-6)) continue;
      d /= len;
      // Keep a margin from the diagonal, where both ratios degenerate.
      Vector ones = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
      if (std::abs(d.dot(ones)) > 0.99) continue;
      dirs.push_back(d);
    }
  }

  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(norms) * dirs.size());
  for (int i = 0; i < norms; ++i) {
    const double r = norms == 1 ? lo
                                : lo * std::pow(hi / lo, static_cast<double>(i) /
                                                             static_cast<double>(norms - 1));
    for (const auto& d : dirs) out.push_back(r * d);
  }
  return out;
}

OscillationScan oscillation_scan(Field field, const Vector& chamber,
                                 const std::vector<Vector>& lambdas, std::int64_t samples,
                                 Seed seed, int partitions) {
  check_chamber(chamber);
  if (lambdas.empty()) throw SpecError("oscillation_scan: empty grid");
  for (const auto& l : lambdas)
    if (l.size() != chamber.size()) throw SpecError("oscillation_scan: lambda dimension mismatch");
  if (samples < 2) throw SpecError("oscillation_scan: need at least 2 samples");
  return field == Field::Real
             ? scan_impl<double>(field, chamber, lambdas, samples, seed, partitions)
             : scan_impl<std::complex<double>>(field, chamber, lambdas, samples, seed, partitions);
}

}  // namespace glwalk
