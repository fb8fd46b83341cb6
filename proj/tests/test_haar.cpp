#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "glwalk/haar.hpp"
#include "glwalk/matrix_core.hpp"
#include "glwalk/rng.hpp"

using namespace glwalk;
using cd = std::complex<double>;

namespace {

// One-sample KS distance against U(0,1).
double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max(d, std::max(x[i] - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - x[i]));
  }
  return d;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace

TEST_CASE("sampled matrices are unitary to roundoff") {
  Rng rng = make_rng(Seed{11, 0});
  for (int n = 1; n <= 5; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      CHECK(unitary_defect(sample_haar_real(n, rng)) <= 1e-12 * n);
      CHECK(unitary_defect(sample_haar_complex(n, rng)) <= 1e-12 * n);
    }
  }
}

TEST_CASE("same seed reproduces the draw bitwise") {
  Rng r1 = make_rng(Seed{42, 7});
  Rng r2 = make_rng(Seed{42, 7});
  for (int rep = 0; rep < 5; ++rep) {
    RealMatrix a = sample_haar_real(3, r1);
    RealMatrix b = sample_haar_real(3, r2);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    ComplexMatrix c = sample_haar_complex(3, r1);
    ComplexMatrix d = sample_haar_complex(3, r2);
    CHECK((c - d).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("first-entry second moment is 1/n") {
  auto sq_real = [](const RealMatrix& k) {
    Vector v(1);
    v[0] = k(0, 0) * k(0, 0);
    return v;
  };
  auto est = haar_expect<double>(sq_real, 2, 100000, Seed{201, 0}, 4);
  CHECK(std::abs(est[0].mean - 0.5) <= 4.0 * est[0].std_error);

  auto sq_cplx = [](const ComplexMatrix& k) {
    Vector v(1);
    v[0] = std::norm(k(0, 0));
    return v;
  };
  auto estc = haar_expect<cd>(sq_cplx, 3, 100000, Seed{202, 0}, 4);
  CHECK(std::abs(estc[0].mean - 1.0 / 3.0) <= 4.0 * estc[0].std_error);
}

TEST_CASE("|u_11|^2 is uniform on [0,1] for 2x2 complex draws") {
  Rng rng = make_rng(Seed{203, 0});
  std::vector<double> xs(100000);
  for (auto& x : xs) x = std::norm(sample_haar_complex(2, rng)(0, 0));
  CHECK(ks_uniform(xs) < 0.01);
}

TEST_CASE("expectation driver basics") {
  auto one = [](const RealMatrix&) { return Vector::Ones(1).eval(); };
  auto est1 = haar_expect<double>(one, 3, 1000, Seed{204, 0});
  CHECK(est1[0].mean == 1.0);
  CHECK(est1[0].std_error == 0.0);
  CHECK(est1[0].samples == 1000);

  auto entry = [](const RealMatrix& k) {
    Vector v(1);
    v[0] = k(0, 0);
    return v;
  };
  auto est0 = haar_expect<double>(entry, 3, 50000, Seed{205, 0}, 2);
  CHECK(std::abs(est0[0].mean) <= 4.0 * est0[0].std_error);
}

TEST_CASE("leading-minor log moment matches the closed form") {
  // E[ln(4 cos^2 + sin^2)] over the circle = 2 ln(3/2)
  RealMatrix a = RealMatrix::Zero(2, 2);
  a(0, 0) = 4.0;
  a(1, 1) = 1.0;
  auto f = [&](const RealMatrix& k) {
    RealMatrix p = k.transpose() * a * k;
    Vector v(1);
    v[0] = std::log(p(0, 0));
    return v;
  };
  auto est = haar_expect<double>(f, 2, 200000, Seed{206, 0}, 4);
  CHECK(std::abs(est[0].mean - 0.81093021621632876) <= 4.0 * est[0].std_error + 1e-12);
  CHECK(est[0].std_error < 0.01);
}

TEST_CASE("driver output is a pure function of seed, samples, partitions") {
  auto f = [](const ComplexMatrix& k) {
    Vector v(2);
    v[0] = std::real(k.trace());
    v[1] = std::norm(k(0, 1));
    return v;
  };
  auto run = [&] { return haar_expect<cd>(f, 3, 30000, Seed{207, 5}, 3); };
  auto a = run();
  auto b = run();
  REQUIRE(a.size() == b.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    CHECK(a[j].mean == b[j].mean);
    CHECK(a[j].std_error == b[j].std_error);
    CHECK(a[j].samples == b[j].samples);
  }

  // different partition counts estimate the same quantity
  auto p1 = haar_expect<cd>(f, 3, 40000, Seed{208, 0}, 1);
  auto p4 = haar_expect<cd>(f, 3, 40000, Seed{208, 0}, 4);
  for (std::size_t j = 0; j < p1.size(); ++j) {
    CHECK(std::abs(p1[j].mean - p4[j].mean) <= 4.0 * (p1[j].std_error + p4[j].std_error));
  }
}

TEST_CASE("standard error halves when samples quadruple") {
  auto f = [](const RealMatrix& k) {
    Vector v(1);
    v[0] = k(0, 0);
    return v;
  };
  auto small = haar_expect<double>(f, 2, 40000, Seed{209, 0}, 2);
  auto big = haar_expect<double>(f, 2, 160000, Seed{210, 0}, 2);
  const double ratio = big[0].std_error / small[0].std_error;
  CHECK(ratio > 0.4);
  CHECK(ratio < 0.6);
}

TEST_CASE("non-finite integrand values are reported, not averaged") {
  auto bad = [](const RealMatrix&) {
    Vector v(1);
    v[0] = std::numeric_limits<double>::quiet_NaN();
    return v;
  };
  CHECK_THROWS_AS((haar_expect<double>(bad, 2, 10, Seed{211, 0})), NonFiniteIntegrand);
}

TEST_CASE("left translation leaves the distribution invariant") {
  // Re tr(v u) for fixed unitary v should match Re tr(u) in distribution.
  const double th = 0.3;
  RealMatrix v = RealMatrix::Identity(3, 3);
  v(0, 0) = std::cos(th);
  v(0, 1) = -std::sin(th);
  v(1, 0) = std::sin(th);
  v(1, 1) = std::cos(th);

  Rng rng = make_rng(Seed{212, 0});
  const int m = 100000;
  std::vector<double> translated(m), plain(m);
  for (int i = 0; i < m; ++i) translated[static_cast<std::size_t>(i)] = (v * sample_haar_real(3, rng)).trace();
  for (int i = 0; i < m; ++i) plain[static_cast<std::size_t>(i)] = sample_haar_real(3, rng).trace();
  CHECK(two_sample_ks(translated, plain) < 0.02);
}
