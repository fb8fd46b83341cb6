#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <memory>

#include "glwalk/matrix_core.hpp"
#include "glwalk/measures.hpp"

using namespace glwalk;
using cd = std::complex<double>;

namespace {

BiinvariantMeasure point_measure(Field f, const Vector& x) {
  BiinvariantMeasure nu;
  nu.field = f;
  nu.n = static_cast<int>(x.size());
  nu.components.push_back({1.0, ChamberLaw{PointLaw{x}}});
  return nu;
}

BiinvariantMeasure two_point_measure(Field f, double w0, const Vector& a, double w1,
                                     const Vector& b) {
  BiinvariantMeasure nu;
  nu.field = f;
  nu.n = static_cast<int>(a.size());
  nu.components.push_back({w0, ChamberLaw{PointLaw{a}}});
  nu.components.push_back({w1, ChamberLaw{PointLaw{b}}});
  double t = w0 + w1;
  nu.components[0].weight /= t;
  nu.components[1].weight /= t;
  return nu;
}

}  // namespace

TEST_CASE("measure JSON parsing, normalization, round trip") {
  const std::string doc = R"({
    "field": "real", "n": 2,
    "components": [
      {"weight": 3, "law": {"point": [1.0, -0.5]}},
      {"weight": 7, "law": {"sorted_iid": {"marginal": {"uniform": {"lo": -1.0, "hi": 2.0}}, "n": 2}}}
    ]})";
  auto nu = parse_measure(doc);
  CHECK(nu.field == Field::Real);
  CHECK(nu.n == 2);
  REQUIRE(nu.components.size() == 2);
  CHECK(nu.components[0].weight == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(nu.components[1].weight == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(law_point(nu.components[0].law).has_value());
  CHECK(!law_point(nu.components[1].law).has_value());

  auto again = parse_measure(measure_to_json(nu));
  CHECK(again.n == nu.n);
  CHECK(again.field == nu.field);
  REQUIRE(again.components.size() == 2);
  CHECK(again.components[0].weight == nu.components[0].weight);
  CHECK((*law_point(again.components[0].law) - *law_point(nu.components[0].law)).norm() == 0.0);
}

TEST_CASE("measure JSON rejects malformed documents") {
  CHECK_THROWS_AS(parse_measure("not json at all"), SpecError);
  CHECK_THROWS_AS(parse_measure(R"({"field": "quaternion", "n": 2, "components": []})"), SpecError);
  CHECK_THROWS_AS(parse_measure(R"({"field": "real", "n": 2, "components": []})"), SpecError);
  CHECK_THROWS_AS(parse_measure(R"({"field": "real", "components": [{"weight": 1, "law": {"point": [0, 0]}}]})"),
                  SpecError);
  CHECK_THROWS_AS(
      parse_measure(
          R"({"field": "real", "n": 2, "components": [{"weight": -1, "law": {"point": [0.0, 0.0]}}]})"),
      SpecError);
  CHECK_THROWS_AS(
      parse_measure(R"({"field": "real", "n": 2, "components": [{"weight": 1, "law": {"blah": 3}}]})"),
      SpecError);
}

TEST_CASE("scaled laws nest and shift the point") {
  const std::string doc = R"({
    "field": "complex", "n": 2,
    "components": [
      {"weight": 1, "law": {"scaled": {"base": {"scaled": {"base": {"point": [0.5, -0.5]},
                                                            "shift": 1.0}},
                                        "shift": -0.25}}}
    ]})";
  auto nu = parse_measure(doc);
  auto p = law_point(nu.components[0].law);
  REQUIRE(p.has_value());
  CHECK((*p)[0] == doctest::Approx(1.25).epsilon(1e-15));
  CHECK((*p)[1] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("chamber sampling: sorted draws, list marginals, shifts") {
  Rng rng = make_rng(Seed{401, 0});
  ChamberLaw iid{SortedIidLaw{NormalMarginal{0.0, 2.0}, 4}};
  for (int rep = 0; rep < 200; ++rep) {
    Vector x = sample_chamber(iid, 4, rng);
    for (int i = 1; i < 4; ++i) CHECK(x[i] <= x[i - 1]);
  }

  ChamberLaw lst{SortedIidLaw{ListMarginal{{-1.5, 0.25, 2.0}}, 3}};
  for (int rep = 0; rep < 100; ++rep) {
    Vector x = sample_chamber(lst, 3, rng);
    for (int i = 0; i < 3; ++i)
      CHECK((x[i] == -1.5 || x[i] == 0.25 || x[i] == 2.0));
  }

  auto base = std::make_shared<ChamberLaw>(ChamberLaw{SortedIidLaw{UniformMarginal{-1.0, 1.0}, 2}});
  ChamberLaw scaled{ScaledLaw{base, 3.0}};
  for (int rep = 0; rep < 100; ++rep) {
    Vector x = sample_chamber(scaled, 2, rng);
    CHECK(x[0] >= 2.0);
    CHECK(x[1] <= 4.0);
    CHECK(x[1] <= x[0]);
  }
}

TEST_CASE("group elements realize their chamber point") {
  const std::string doc = R"({
    "field": "real", "n": 3,
    "components": [
      {"weight": 1, "law": {"sorted_iid": {"marginal": {"normal": {"mu": 0.3, "sigma": 1.1}}, "n": 3}}}
    ]})";
  auto nu = parse_measure(doc);
  Rng rng = make_rng(Seed{402, 0});
  for (int rep = 0; rep < 50; ++rep) {
    auto s = sample_group_element(nu, rng);
    Vector ls = singular_log_spectrum(s.g);
    CHECK((2.0 * ls - s.chamber).cwiseAbs().maxCoeff() <= 1e-9);
  }

  // point mass at the origin draws unitaries
  auto delta0 = point_measure(Field::Complex, Vector::Zero(2));
  for (int rep = 0; rep < 20; ++rep) {
    auto s = sample_group_element(delta0, rng);
    CHECK(unitary_defect(s.g) <= 1e-12 * 2);
  }

  // scalar point 2c * (1,..,1) draws e^c times a unitary
  const double c = 0.8;
  auto scalar = point_measure(Field::Real, Vector::Constant(2, 2.0 * c));
  for (int rep = 0; rep < 20; ++rep) {
    auto s = sample_group_element(scalar, rng);
    CHECK(unitary_defect(ComplexMatrix(s.g / std::exp(c))) <= 1e-11);
  }
}

TEST_CASE("point-mass moments match the closed form") {
  Vector x(2);
  x << std::log(16.0), 0.0;
  auto nu = point_measure(Field::Real, x);
  auto mm = measure_moments(nu, 10, 200000, Seed{403, 0}, 4);
  CHECK(mm.exact_outer);
  CHECK(mm.outer_samples == 1);
  CHECK(mm.inner_samples == 200000);
  CHECK(mm.m1_se_outer.maxCoeff() == 0.0);
  // E[ln det_1] for gg* = diag(16, 1): 2 ln((4+1)/2)
  CHECK(std::abs(mm.m1[0] - 1.8325814637483101) <= 4.0 * mm.m1_se[0] + 1e-10);
  // profile sums telescope: mean sum is the log determinant exactly
  CHECK(std::abs(mm.m1.sum() - x.sum()) <= 1e-10);
  CHECK((mm.sigma2 * Vector::Ones(2)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("covariance definiteness classification") {
  // scalar point: profile deterministic, covariance at the cancellation floor
  auto scalar = point_measure(Field::Real, Vector::Constant(2, 1.4));
  auto ms = measure_moments(scalar, 10, 20000, Seed{404, 0});
  CHECK(ms.sigma2.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(!ms.definiteness.positive_definite);

  // two sl-type points (zero log-det): sum direction degenerates exactly
  Vector a(2), b(2);
  a << 1.3, -1.3;
  b << 0.4, -0.4;
  auto sl = two_point_measure(Field::Real, 0.5, a, 0.5, b);
  auto msl = measure_moments(sl, 10, 50000, Seed{405, 0}, 2);
  CHECK(!msl.definiteness.positive_definite);
  CHECK(msl.definiteness.rank == 1);
  REQUIRE(msl.definiteness.kernel_direction.size() == 2);
  const double overlap =
      std::abs(msl.definiteness.kernel_direction.dot(Vector::Constant(2, 1.0 / std::sqrt(2.0))));
  CHECK(overlap >= 1.0 - 1e-3);

  // generic two-point mixture: spread in the sum direction restores full rank
  Vector p(2), q(2);
  p << 0.9, -0.2;
  q << -0.3, -1.1;
  auto gen = two_point_measure(Field::Real, 0.4, p, 0.6, q);
  auto mg = measure_moments(gen, 10, 50000, Seed{406, 0}, 2);
  CHECK(mg.definiteness.positive_definite);
  CHECK(mg.definiteness.rank == 2);
  CHECK(mg.definiteness.min_eigenvalue > 0.0);
}

TEST_CASE("uniform shifts move the drift and leave the covariance") {
  // point base: same seed pairs the Haar streams, so the comparison is exact
  Vector x(3);
  x << 1.0, 0.2, -0.6;
  auto base = point_measure(Field::Real, x);
  BiinvariantMeasure shifted;
  shifted.field = Field::Real;
  shifted.n = 3;
  auto inner_law = std::make_shared<ChamberLaw>(ChamberLaw{PointLaw{x}});
  shifted.components.push_back({1.0, ChamberLaw{ScaledLaw{inner_law, 0.75}}});

  auto m0 = measure_moments(base, 10, 20000, Seed{407, 0});
  auto m1 = measure_moments(shifted, 10, 20000, Seed{407, 0});
  CHECK((m1.m1 - m0.m1 - Vector::Constant(3, 0.75)).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((m1.sigma2 - m0.sigma2).cwiseAbs().maxCoeff() <= 1e-9);

  // continuous base: the chamber stream pairs as well (shift applied after
  // the same underlying draws), so the comparison stays deterministic
  BiinvariantMeasure cbase;
  cbase.field = Field::Real;
  cbase.n = 2;
  cbase.components.push_back({1.0, ChamberLaw{SortedIidLaw{UniformMarginal{-1.0, 1.0}, 2}}});
  BiinvariantMeasure cshift;
  cshift.field = Field::Real;
  cshift.n = 2;
  auto cb = std::make_shared<ChamberLaw>(cbase.components[0].law);
  cshift.components.push_back({1.0, ChamberLaw{ScaledLaw{cb, -0.4}}});

  auto c0 = measure_moments(cbase, 300, 64, Seed{408, 0}, 2);
  auto c1 = measure_moments(cshift, 300, 64, Seed{408, 0}, 2);
  CHECK((c1.m1 - c0.m1 + Vector::Constant(2, 0.4)).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((c1.sigma2 - c0.sigma2).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("transform at lambda = 0 is exactly one") {
  Vector a(2), b(2);
  a << 0.9, -0.1;
  b << 0.2, 0.0;
  auto nu = two_point_measure(Field::Complex, 0.5, a, 0.5, b);
  auto est = spherical_transform(nu, Vector::Zero(2), 10, 3000, Seed{409, 0});
  CHECK(est.mean == cd(1.0, 0.0));
  CHECK(est.std_error == 0.0);
}

TEST_CASE("point-mass transform: reconstruction of the estimator stream") {
  // Reproduce the documented exact-path estimator: one shared Haar stream
  // derived with the inner-stream salt, per-sample value e^{-i lambda . f}.
  Vector x(2);
  x << 1.1, -0.3;
  Vector lam(2);
  lam << 0.8, -1.7;
  const Seed seed{410, 3};
  const std::int64_t inner = 4000;

  auto nu = point_measure(Field::Real, x);
  auto lib = spherical_transform(nu, lam, 10, inner, seed, 3);

  auto ps = ProfileSampler<double>::from_chamber(x);
  Rng rng = make_rng(derive(seed, salt::kHaarInner));
  Welford<cd> w;
  for (std::int64_t i = 0; i < inner; ++i) {
    RealMatrix k = sample_haar_real(2, rng);
    const double t = lam.dot(ps.profile(k));
    cd v(0.0, 0.0);
    v += 1.0 * cd(std::cos(t), -std::sin(t));
    w.push(v);
  }
  auto manual = w.estimate();
  CHECK(manual.mean == lib.mean);
  CHECK(manual.std_error == lib.std_error);
  CHECK(manual.samples == lib.samples);

  // and the partition count does not enter the exact path at all
  auto lib1 = spherical_transform(nu, lam, 10, inner, seed, 1);
  CHECK(lib1.mean == lib.mean);
  CHECK(lib1.std_error == lib.std_error);
}

TEST_CASE("point-mass transform agrees with the spherical function") {
  Vector x(2);
  x << 1.1, -0.3;
  Vector lam(2);
  lam << 0.8, -1.7;
  auto nu = point_measure(Field::Real, x);
  auto tr = spherical_transform(nu, lam, 10, 50000, Seed{411, 0});
  auto phi = spherical_fn(Field::Real, x, Vector(-lam), 50000, Seed{412, 0});
  CHECK(std::abs(tr.mean - phi.mean) <= 4.0 * (tr.std_error + phi.std_error));
}

TEST_CASE("grid evaluation shares samples with single-point evaluation") {
  BiinvariantMeasure nu;
  nu.field = Field::Real;
  nu.n = 2;
  nu.components.push_back({1.0, ChamberLaw{SortedIidLaw{UniformMarginal{-0.8, 1.2}, 2}}});
  Vector l1(2), l2(2);
  l1 << 0.5, 0.1;
  l2 << -0.2, 0.9;
  auto grid = spherical_transform_grid(nu, {l1, l2}, 200, 32, Seed{413, 0}, 2);
  auto single = spherical_transform(nu, l1, 200, 32, Seed{413, 0}, 2);
  REQUIRE(grid.size() == 2);
  CHECK(grid[0].mean == single.mean);
  CHECK(grid[0].std_error == single.std_error);
  CHECK(std::abs(grid[1].mean) <= 1.0 + 1e-12);
}

TEST_CASE("mixture moments are deterministic and partition-consistent") {
  const std::string doc = R"({
    "field": "complex", "n": 2,
    "components": [
      {"weight": 0.5, "law": {"sorted_iid": {"marginal": {"uniform": {"lo": -1.2, "hi": 1.6}}, "n": 2}}},
      {"weight": 0.5, "law": {"point": [0.4, -0.9]}}
    ]})";
  auto nu = parse_measure(doc);

  auto r1 = measure_moments(nu, 400, 48, Seed{414, 0}, 3);
  auto r2 = measure_moments(nu, 400, 48, Seed{414, 0}, 3);
  CHECK(!r1.exact_outer);  // mixed point + continuous runs the outer MC path
  CHECK((r1.m1 - r2.m1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r1.m1_se - r2.m1_se).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r1.sigma2 - r2.sigma2).cwiseAbs().maxCoeff() == 0.0);

  // different partition layouts draw different chambers but estimate the
  // same functional
  auto p1 = measure_moments(nu, 600, 48, Seed{415, 0}, 1);
  auto p4 = measure_moments(nu, 600, 48, Seed{415, 0}, 4);
  for (int i = 0; i < 2; ++i)
    CHECK(std::abs(p1.m1[i] - p4.m1[i]) <= 5.0 * (p1.m1_se[i] + p4.m1_se[i]));

  // the per-draw profile sum telescopes, so the drift sum estimates the mean
  // chamber sum: (0.5 * uniform mean sum) + (0.5 * point sum)
  const double want = 0.5 * (2.0 * 0.2) + 0.5 * (0.4 - 0.9);
  CHECK(std::abs(p1.m1.sum() - want) <= 5.0 * p1.m1_se.sum() + 1e-9);
}

TEST_CASE("difference quotients pair with the moment run") {
  Vector a(2), b(2);
  a << 0.8, -0.3;
  b << 1.7, 0.2;
  auto nu = two_point_measure(Field::Real, 0.55, a, 0.45, b);
  const Seed seed{416, 0};
  auto mm = measure_moments(nu, 10, 30000, seed, 2);
  auto td = transform_derivatives(nu, 1e-3, 10, 30000, seed, 2);
  for (int j = 0; j < 2; ++j) {
    CHECK(td.grad[j].real() == 0.0);
    CHECK(std::abs(td.grad[j].imag() + mm.m1[j]) <=
          5.0 * (td.grad_se[j] + mm.m1_se[j]) + 1e-5);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(td.hess(i, j) + mm.m2(i, j)) <=
            5.0 * (td.hess_se(i, j) + mm.m2_se(i, j)) + 1e-5);
}

TEST_CASE("bad evaluation arguments are rejected") {
  auto nu = point_measure(Field::Real, Vector::Zero(2));
  CHECK_THROWS_AS(measure_moments(nu, 10, 1, Seed{}), SpecError);
  CHECK_THROWS_AS(spherical_transform(nu, Vector::Zero(3), 10, 100, Seed{}), SpecError);
  CHECK_THROWS_AS(transform_derivatives(nu, 0.0, 10, 100, Seed{}), SpecError);
  CHECK_THROWS_AS(transform_derivatives(nu, -1e-3, 10, 100, Seed{}), SpecError);
}
