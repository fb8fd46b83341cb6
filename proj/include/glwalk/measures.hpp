#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "glwalk/spherical.hpp"
#include "glwalk/types.hpp"

// Biinvariant measures on the group, described by a mixture of chamber-point
// laws: the group element is u1 diag(e^{x/2}) u2 with independent Haar u1, u2
// and x drawn from the chamber marginal, so 2 ln sigma_sing(g) = x exactly.

namespace glwalk {

struct NormalMarginal {
  double mu = 0.0, sigma = 1.0;
};
struct UniformMarginal {
  double lo = 0.0, hi = 1.0;
};
// Uniform draw from an explicit finite list (typically log-spaced values).
struct ListMarginal {
  std::vector<double> values;
};
using Marginal = std::variant<NormalMarginal, UniformMarginal, ListMarginal>;

struct ChamberLaw;

// Point mass at a fixed chamber point.
struct PointLaw {
  Vector x;
};
// n i.i.d. draws from the marginal, sorted descending.
struct SortedIidLaw {
  Marginal marginal;
  int n = 0;
};
// Base law shifted by shift * (1, ..., 1); scales the group element by
// e^{shift/2}.
struct ScaledLaw {
  std::shared_ptr<ChamberLaw> base;
  double shift = 0.0;
};

struct ChamberLaw {
  std::variant<PointLaw, SortedIidLaw, ScaledLaw> law;
};

struct MeasureComponent {
  double weight = 1.0;  // stored normalized
  ChamberLaw law;
};

struct BiinvariantMeasure {
  Field field = Field::Real;
  int n = 0;
  std::vector<MeasureComponent> components;
};

// Parse/serialize the measure JSON document:
// {"field": "real"|"complex", "n": int, "components": [{"weight": w,
//   "law": {"point": [...]}
//        | {"sorted_iid": {"marginal": {"normal": {"mu","sigma"}}
//                                    | {"uniform": {"lo","hi"}}
//                                    | {"log_spaced": [...]}, "n": int}}
//        | {"scaled": {"base": <law>, "shift": s}}}]}
// Malformed documents raise SpecError naming the offending field.
BiinvariantMeasure parse_measure(const std::string& json_text);
std::string measure_to_json(const BiinvariantMeasure& nu);

// If the law is a point mass (possibly through Scaled wrappers), its chamber
// point; otherwise nullopt.  Finite point mixtures get exact outer sums.
std::optional<Vector> law_point(const ChamberLaw& law);

Vector sample_chamber(const ChamberLaw& law, int n, Rng& rng);
Vector sample_chamber(const BiinvariantMeasure& nu, Rng& rng);

template <typename Scalar>
Matrix<Scalar> group_element_from_chamber(const Vector& x, Rng& rng) {
  Matrix<Scalar> u1 = sample_haar<Scalar>(static_cast<int>(x.size()), rng);
  Matrix<Scalar> u2 = sample_haar<Scalar>(static_cast<int>(x.size()), rng);
  return u1 * (x / 2.0).array().exp().matrix().template cast<Scalar>().asDiagonal() * u2;
}

// One draw g = u1 diag(e^{x/2}) u2 together with its chamber point.  The
// matrix is stored complex; the imaginary part is zero for the real field.
struct SampledElement {
  ComplexMatrix g;
  Vector chamber;
};
SampledElement sample_group_element(const BiinvariantMeasure& nu, Rng& rng);

struct DefinitenessReport {
  bool positive_definite = false;
  int rank = 0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  Vector kernel_direction;  // empty when positive definite
};

DefinitenessReport definiteness_report(const RealMatrix& sym);

// Mixture moments: m1(nu) = E_x m1(g_x), sigma2(nu) = E_x m2(g_x) - m1 m1^T.
// Finite point mixtures enumerate the outer layer exactly over one shared
// inner Haar stream (per-sample identities survive the mixture); continuous
// laws draw an independent inner stream per outer draw, so m1_se is the
// spread of i.i.d. per-draw means.  The outer/inner breakdown attributes the
// error: zero outer part on the exact path, and on the MC path the inner part
// is the within-draw Haar-noise share (diagnostic, already inside m1_se).
struct MeasureMoments {
  Vector m1, m1_se, m1_se_outer, m1_se_inner;
  RealMatrix m2, m2_se;
  RealMatrix sigma2, sigma2_se;
  DefinitenessReport definiteness;
  std::int64_t outer_samples = 0, inner_samples = 0;
  bool exact_outer = false;  // finite point mixture enumerated exactly
};

MeasureMoments measure_moments(const BiinvariantMeasure& nu, std::int64_t outer_samples,
                               std::int64_t inner_samples, Seed seed, int partitions = 1);

// nu-hat(lambda) = integral of phi_{i rho - lambda}(g) d nu(g); every sampled
// profile is shared across all grid points (common random numbers in lambda).
MCEstimateC spherical_transform(const BiinvariantMeasure& nu, const Vector& lambda,
                                std::int64_t outer_samples, std::int64_t inner_samples,
                                Seed seed, int partitions = 1);
std::vector<MCEstimateC> spherical_transform_grid(const BiinvariantMeasure& nu,
                                                  const std::vector<Vector>& lambdas,
                                                  std::int64_t outer_samples,
                                                  std::int64_t inner_samples, Seed seed,
                                                  int partitions = 1);

// Central difference quotients of nu-hat at lambda = 0 with step h, averaged
// per sample (identical in mean to differencing shared-seed grid values, with
// honest standard errors):  grad_j ~ -i m1(nu)_j,  hess_ij ~ -m2(nu)_ij.
struct TransformDerivatives {
  double h = 0.0;
  Eigen::VectorXcd grad;
  Vector grad_se;
  RealMatrix hess;  // the quotients are real by symmetry of the cosine terms
  RealMatrix hess_se;
  std::int64_t outer_samples = 0, inner_samples = 0;
};
TransformDerivatives transform_derivatives(const BiinvariantMeasure& nu, double h,
                                           std::int64_t outer_samples,
                                           std::int64_t inner_samples, Seed seed,
                                           int partitions = 1);

}  // namespace glwalk
