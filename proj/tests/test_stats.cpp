#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "glwalk/rng.hpp"
#include "glwalk/stats.hpp"

using namespace glwalk;

namespace {

// Invert the normal CDF by bisection; only used to build quantile grids.
double normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normal cdf reference values") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.0) == doctest::Approx(0.84134474606854293).epsilon(1e-14));
  CHECK(normal_cdf(1.96) == doctest::Approx(0.97500210485177952).epsilon(1e-14));
  CHECK(normal_cdf(8.0) == doctest::Approx(0.99999999999999933).epsilon(1e-15));
  // deep tails must stay relatively accurate, not just absolutely small
  CHECK(normal_cdf(-5.0) == doctest::Approx(2.8665157187919328e-07).epsilon(1e-12));
  CHECK(normal_cdf(-37.0) == doctest::Approx(5.7255712225239266e-300).epsilon(1e-12));
  CHECK(normal_cdf(-1.3) + normal_cdf(1.3) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("kolmogorov survival function reference values") {
  CHECK(kolmogorov_sf(0.3) == doctest::Approx(0.99999069419866549).epsilon(1e-13));
  CHECK(kolmogorov_sf(0.5) == doctest::Approx(0.96394524366487511).epsilon(1e-13));
  CHECK(kolmogorov_sf(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-13));
  CHECK(kolmogorov_sf(1.5) == doctest::Approx(0.022217962616525127).epsilon(1e-13));
  CHECK(kolmogorov_sf(2.5) == doctest::Approx(7.4533063441573419e-06).epsilon(1e-12));
  // monotone decreasing from 1 to 0
  CHECK(kolmogorov_sf(0.01) == doctest::Approx(1.0).epsilon(1e-12));
  double prev = 1.0;
  for (double t = 0.2; t < 3.0; t += 0.1) {
    const double v = kolmogorov_sf(t);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("ks p-value uses the finite-sample argument") {
  CHECK(ks_p_value(0.05, 1000) ==
        doctest::Approx(0.012958845703741699).epsilon(1e-12));
  CHECK(ks_p_value(0.0, 100) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ks_p_value(0.9, 100) <= 1e-10);
}

TEST_CASE("ks statistic against a normal reference") {
  // quantile grid: essentially a perfect normal sample
  const int m = 2000;
  std::vector<double> xs(m);
  for (int i = 0; i < m; ++i)
    xs[static_cast<std::size_t>(i)] = 1.5 + 0.8 * normal_quantile((i + 0.5) / m);
  CHECK(ks_statistic_normal(xs, 1.5, 0.8) < 1e-3);

  // a located shift is seen immediately
  for (auto& x : xs) x += 3.0 * 0.8;
  CHECK(ks_statistic_normal(xs, 1.5, 0.8) > 0.5);
}

TEST_CASE("mardia statistics on a pinned dataset") {
  RealMatrix z(3, 2);
  z << 0.5, -1.0, 1.5, 0.25, -0.75, 2.0;
  auto r = mardia_statistics(z);
  CHECK(r.dimension == 2);
  CHECK(r.samples == 3);
  CHECK(r.skewness == doctest::Approx(9.1403537326388893).epsilon(1e-12));
  CHECK(r.kurtosis == doctest::Approx(9.2421875).epsilon(1e-12));
  CHECK(r.kurtosis_z == doctest::Approx(0.12027428750917564).epsilon(1e-12));
}

TEST_CASE("mardia statistics are calibrated on true gaussian input") {
  Rng rng = make_rng(Seed{501, 0});
  std::normal_distribution<double> g;
  const int n = 5000, q = 3;
  RealMatrix z(n, q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < q; ++j) z(i, j) = g(rng);
  auto r = mardia_statistics(z);
  CHECK(std::abs(r.kurtosis_z) < 5.0);
  CHECK(r.skewness < 0.1);
  CHECK(r.kurtosis == doctest::Approx(q * (q + 2)).epsilon(0.05));
}
