#include "glwalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace glwalk {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic_normal(std::vector<double> sample, double mu, double sigma) {
  if (sample.empty()) throw SpecError("ks_statistic_normal: empty sample");
  if (!(sigma > 0.0)) throw SpecError("ks_statistic_normal: sigma must be positive");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf((sample[i] - mu) / sigma);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double kolmogorov_sf(double t) {
  if (!(t > 0.0)) return 1.0;
  if (t < 1.18) {
    // Jacobi-theta form; three terms reach double precision on this range.
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * t * t));
    const double sum = y + std::pow(y, 9.0) + std::pow(y, 25.0) + std::pow(y, 49.0);
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / t * sum;
  }
  const double y = std::exp(-2.0 * t * t);
  double sf = 0.0;
  double term = y;
  for (int k = 1; k <= 16 && std::abs(term) > 1e-300; ++k) {
    sf += term;
    const double next = std::pow(y, static_cast<double>((k + 1) * (k + 1)));
    term = (k % 2 == 1) ? -next : next;
  }
  return std::clamp(2.0 * sf, 0.0, 1.0);
}

double ks_p_value(double d, std::int64_t n) {
  if (n < 1) throw SpecError("ks_p_value: need at least one sample");
  const double rn = std::sqrt(static_cast<double>(n));
  return kolmogorov_sf(d * (rn + 0.12 + 0.11 / rn));
}

MardiaResult mardia_statistics(const RealMatrix& z) {
  const auto N = z.rows();
  const int q = static_cast<int>(z.cols());
  if (N < 2 || q < 1) throw SpecError("mardia_statistics: need at least 2 samples");
  MardiaResult out;
  out.dimension = q;
  out.samples = N;

  // b1 = (1/N^2) sum_{i,j} (z_i . z_j)^3 = sum_{abc} M_abc^2 with the third
  // moment tensor M_abc = (1/N) sum_i z_ia z_ib z_ic; O(N q^3) instead of N^2.
  std::vector<double> m3(static_cast<std::size_t>(q) * q * q, 0.0);
  double b2 = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto row = z.row(i);
    const double s2 = row.squaredNorm();
    b2 += s2 * s2;
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        for (int c = 0; c < q; ++c)
          m3[static_cast<std::size_t>((a * q + b) * q + c)] += row[a] * row[b] * row[c];
  }
  double b1 = 0.0;
  for (double v : m3) b1 += (v / static_cast<double>(N)) * (v / static_cast<double>(N));
  out.skewness = b1;
  out.kurtosis = b2 / static_cast<double>(N);
  const double dq = static_cast<double>(q);
  const double null_mean = dq * (dq + 2.0);
  const double null_sd = std::sqrt(8.0 * dq * (dq + 2.0) * (dq + 3.0) / static_cast<double>(N));
  out.kurtosis_z = (out.kurtosis - null_mean) / null_sd;
  return out;
}

}  // namespace glwalk
