#include "glwalk/measures.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <sstream>

namespace glwalk {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw SpecError("measure: " + path + ": " + msg);
}

double number_at(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key) || !j[key].is_number()) fail(path + "." + key, "expected a number");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) fail(path + "." + key, "must be finite");
  return v;
}

Marginal parse_marginal(const json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 1) fail(path, "expected exactly one marginal kind");
  if (j.contains("normal")) {
    const json& m = j["normal"];
    NormalMarginal out;
    out.mu = number_at(m, "mu", path + ".normal");
    out.sigma = number_at(m, "sigma", path + ".normal");
    if (!(out.sigma > 0.0)) fail(path + ".normal.sigma", "must be positive");
    return out;
  }
  if (j.contains("uniform")) {
    const json& m = j["uniform"];
    UniformMarginal out;
    out.lo = number_at(m, "lo", path + ".uniform");
    out.hi = number_at(m, "hi", path + ".uniform");
    if (!(out.lo <= out.hi)) fail(path + ".uniform", "lo must not exceed hi");
    return out;
  }
  if (j.contains("log_spaced")) {
    const json& m = j["log_spaced"];
    if (!m.is_array() || m.empty()) fail(path + ".log_spaced", "expected a non-empty array");
    ListMarginal out;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i].is_number()) fail(path + ".log_spaced", "entries must be numbers");
      const double v = m[i].get<double>();
      if (!std::isfinite(v)) fail(path + ".log_spaced", "entries must be finite");
      out.values.push_back(v);
    }
    return out;
  }
  fail(path, "unknown marginal kind (expected normal | uniform | log_spaced)");
}

ChamberLaw parse_law(const json& j, int n, const std::string& path) {
  if (!j.is_object() || j.size() != 1) fail(path, "expected exactly one law kind");
  ChamberLaw out;
  if (j.contains("point")) {
    const json& p = j["point"];
    if (!p.is_array() || static_cast<int>(p.size()) != n)
      fail(path + ".point", "expected an array of length n");
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      if (!p[static_cast<std::size_t>(i)].is_number()) fail(path + ".point", "entries must be numbers");
      x[i] = p[static_cast<std::size_t>(i)].get<double>();
      if (!std::isfinite(x[i])) fail(path + ".point", "entries must be finite");
      if (i > 0 && x[i] > x[i - 1]) fail(path + ".point", "coordinates must be descending");
    }
    out.law = PointLaw{std::move(x)};
    return out;
  }
  if (j.contains("sorted_iid")) {
    const json& s = j["sorted_iid"];
    if (!s.is_object()) fail(path + ".sorted_iid", "expected an object");
    if (!s.contains("marginal")) fail(path + ".sorted_iid.marginal", "missing");
    SortedIidLaw law;
    law.marginal = parse_marginal(s["marginal"], path + ".sorted_iid.marginal");
    if (!s.contains("n") || !s["n"].is_number_integer())
      fail(path + ".sorted_iid.n", "expected an integer");
    law.n = s["n"].get<int>();
    if (law.n != n) fail(path + ".sorted_iid.n", "must match the measure dimension");
    out.law = std::move(law);
    return out;
  }
  if (j.contains("scaled")) {
    const json& s = j["scaled"];
    if (!s.is_object() || !s.contains("base")) fail(path + ".scaled.base", "missing");
    ScaledLaw law;
    law.base = std::make_shared<ChamberLaw>(parse_law(s["base"], n, path + ".scaled.base"));
    law.shift = number_at(s, "shift", path + ".scaled");
    out.law = std::move(law);
    return out;
  }
  fail(path, "unknown law kind (expected point | sorted_iid | scaled)");
}

json marginal_to_json(const Marginal& m) {
  json j;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NormalMarginal>) {
          j["normal"] = {{"mu", v.mu}, {"sigma", v.sigma}};
        } else if constexpr (std::is_same_v<T, UniformMarginal>) {
          j["uniform"] = {{"lo", v.lo}, {"hi", v.hi}};
        } else {
          j["log_spaced"] = v.values;
        }
      },
      m);
  return j;
}

json law_to_json(const ChamberLaw& law) {
  json j;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointLaw>) {
          j["point"] = std::vector<double>(v.x.data(), v.x.data() + v.x.size());
        } else if constexpr (std::is_same_v<T, SortedIidLaw>) {
          j["sorted_iid"] = {{"marginal", marginal_to_json(v.marginal)}, {"n", v.n}};
        } else {
          j["scaled"] = {{"base", law_to_json(*v.base)}, {"shift", v.shift}};
        }
      },
      law.law);
  return j;
}

double sample_marginal(const Marginal& m, Rng& rng) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NormalMarginal>) {
          std::normal_distribution<double> d(v.mu, v.sigma);
          return d(rng);
        } else if constexpr (std::is_same_v<T, UniformMarginal>) {
          std::uniform_real_distribution<double> d(v.lo, v.hi);
          return d(rng);
        } else {
          std::uniform_int_distribution<std::size_t> d(0, v.values.size() - 1);
          return v.values[d(rng)];
        }
      },
      m);
}

int pick_component(const BiinvariantMeasure& nu, Rng& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  const double u = d(rng);
  double acc = 0.0;
  for (std::size_t c = 0; c < nu.components.size(); ++c) {
    acc += nu.components[c].weight;
    if (u < acc) return static_cast<int>(c);
  }
  return static_cast<int>(nu.components.size()) - 1;
}

void check_measure(const BiinvariantMeasure& nu) {
  if (nu.n < 1) throw SpecError("measure: n must be positive");
  if (nu.components.empty()) throw SpecError("measure: needs at least one component");
}

// All components resolved to point masses (exact outer enumeration), or empty.
std::vector<std::pair<double, Vector>> point_mixture(const BiinvariantMeasure& nu) {
  std::vector<std::pair<double, Vector>> atoms;
  for (const auto& c : nu.components) {
    auto x = law_point(c.law);
    if (!x) return {};
    atoms.emplace_back(c.weight, *x);
  }
  return atoms;
}

// ---- shared-sample mixture accumulation ------------------------------------
//
// Streams the filled statistic vector over (outer chamber draw) x (inner Haar
// sample).  Point mixtures enumerate the outer layer exactly and share one
// inner stream across atoms (common random numbers across integrands).  For
// continuous outer laws every outer draw gets its own inner stream derived
// from its index, so the per-draw inner means are i.i.d. and their spread
// alone is an unbiased standard error of the grand mean; sharing one inner
// stream across outer draws would instead force inner_samples ~ Var_inner/se^2
// on its own, which is quadratically more work at tight targets.

struct MixtureAccumulation {
  Vector mean, se, se_outer, se_inner;
  std::int64_t outer_used = 0, inner_used = 0;
  bool exact_outer = false;
};

template <typename Scalar>
MixtureAccumulation accumulate_mixture(
    const BiinvariantMeasure& nu, int dims, std::int64_t outer_samples,
    std::int64_t inner_samples, Seed seed, int partitions,
    const std::function<void(const Vector&, Vector&)>& fill) {
  check_measure(nu);
  if (inner_samples < 2) throw SpecError("measure accumulation: inner_samples must be >= 2");
  MixtureAccumulation out;
  const Seed inner_seed = derive(seed, salt::kHaarInner);

  auto atoms = point_mixture(nu);
  if (!atoms.empty()) {
    std::vector<ProfileSampler<Scalar>> samplers;
    samplers.reserve(atoms.size());
    for (const auto& a : atoms) samplers.push_back(ProfileSampler<Scalar>::from_chamber(a.second));
    VectorWelford w(dims);
    Rng rng = make_rng(inner_seed);
    Vector tmp(dims), acc(dims);
    for (std::int64_t i = 0; i < inner_samples; ++i) {
      Matrix<Scalar> k = sample_haar<Scalar>(nu.n, rng);
      acc.setZero();
      for (std::size_t c = 0; c < samplers.size(); ++c) {
        fill(samplers[c].profile(k), tmp);
        acc += atoms[c].first * tmp;
      }
      w.push(acc);
    }
    out.mean = w.mean();
    out.se_inner = w.std_error();
    out.se_outer = Vector::Zero(dims);
    out.se = out.se_inner;
    out.outer_used = static_cast<std::int64_t>(atoms.size());
    out.inner_used = inner_samples;
    out.exact_outer = true;
    return out;
  }

  if (outer_samples < 2) throw SpecError("measure accumulation: outer_samples must be >= 2");
  const double m = static_cast<double>(inner_samples);
  struct Chunk {
    VectorWelford rows;
    Vector within;
  };
  const auto sizes = partition_sizes(outer_samples, partitions);
  std::vector<std::int64_t> offsets(sizes.size(), 0);
  for (std::size_t p = 1; p < sizes.size(); ++p) offsets[p] = offsets[p - 1] + sizes[p - 1];
  auto chunks = run_partitioned<Chunk>(
      outer_samples, partitions, derive(seed, salt::kChamberOuter),
      [&](int p, std::int64_t count, Seed chunk_seed) {
        Chunk ch{VectorWelford(dims), Vector::Zero(dims)};
        Rng outer_rng = make_rng(chunk_seed);
        Vector tmp(dims), acc(dims), acc2(dims);
        for (std::int64_t o = 0; o < count; ++o) {
          Vector x = sample_chamber(nu, outer_rng);
          auto ps = ProfileSampler<Scalar>::from_chamber(x);
          const auto row = static_cast<std::uint64_t>(offsets[static_cast<std::size_t>(p)] + o);
          Rng inner_rng = make_rng(derive(inner_seed, row));
          acc.setZero();
          acc2.setZero();
          for (std::int64_t i = 0; i < inner_samples; ++i) {
            Matrix<Scalar> k = sample_haar<Scalar>(nu.n, inner_rng);
            fill(ps.profile(k), tmp);
            acc += tmp;
            acc2 += tmp.cwiseAbs2();
          }
          acc /= m;
          ch.rows.push(acc);
          ch.within += (acc2 / m - acc.cwiseAbs2()) * (m / (m - 1.0));
        }
        return ch;
      });
  VectorWelford rows(dims);
  Vector within_var = Vector::Zero(dims);
  for (auto& ch : chunks) {
    rows.merge(ch.rows);
    within_var += ch.within;
  }
  out.mean = rows.mean();
  // Rows are i.i.d. (chamber draw + private inner stream), so their spread
  // alone is an unbiased standard error of the grand mean.  The averaged
  // within-row variance isolates how much of it is inner (Haar) noise.
  out.se_outer = rows.std_error();
  out.se_inner =
      (within_var / static_cast<double>(outer_samples)).cwiseMax(0.0).cwiseSqrt() /
      std::sqrt(m * static_cast<double>(outer_samples));
  out.se = out.se_outer;
  out.outer_used = outer_samples;
  out.inner_used = inner_samples;
  return out;
}

MixtureAccumulation accumulate_mixture_dispatch(
    const BiinvariantMeasure& nu, int dims, std::int64_t outer, std::int64_t inner, Seed seed,
    int partitions, const std::function<void(const Vector&, Vector&)>& fill) {
  return nu.field == Field::Real
             ? accumulate_mixture<double>(nu, dims, outer, inner, seed, partitions, fill)
             : accumulate_mixture<std::complex<double>>(nu, dims, outer, inner, seed, partitions,
                                                        fill);
}

}  // namespace

BiinvariantMeasure parse_measure(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("measure: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("$", "expected an object");
  BiinvariantMeasure nu;
  if (!j.contains("field") || !j["field"].is_string()) fail("field", "expected \"real\" or \"complex\"");
  const std::string f = j["field"].get<std::string>();
  if (f == "real") nu.field = Field::Real;
  else if (f == "complex") nu.field = Field::Complex;
  else fail("field", "expected \"real\" or \"complex\"");
  if (!j.contains("n") || !j["n"].is_number_integer()) fail("n", "expected an integer");
  nu.n = j["n"].get<int>();
  if (nu.n < 1) fail("n", "must be >= 1");
  if (!j.contains("components") || !j["components"].is_array() || j["components"].empty())
    fail("components", "expected a non-empty array");
  double total = 0.0;
  for (std::size_t c = 0; c < j["components"].size(); ++c) {
    const std::string path = "components[" + std::to_string(c) + "]";
    const json& jc = j["components"][c];
    if (!jc.is_object()) fail(path, "expected an object");
    MeasureComponent comp;
    comp.weight = number_at(jc, "weight", path);
    if (!(comp.weight > 0.0)) fail(path + ".weight", "must be positive");
    if (!jc.contains("law")) fail(path + ".law", "missing");
    comp.law = parse_law(jc["law"], nu.n, path + ".law");
    total += comp.weight;
    nu.components.push_back(std::move(comp));
  }
  if (!(total > 0.0) || !std::isfinite(total)) fail("components", "weights must sum to a positive finite value");
  for (auto& c : nu.components) c.weight /= total;
  return nu;
}

std::string measure_to_json(const BiinvariantMeasure& nu) {
  json j;
  j["field"] = field_name(nu.field);
  j["n"] = nu.n;
  j["components"] = json::array();
  for (const auto& c : nu.components)
    j["components"].push_back({{"weight", c.weight}, {"law", law_to_json(c.law)}});
  return j.dump();
}

std::optional<Vector> law_point(const ChamberLaw& law) {
  if (const auto* p = std::get_if<PointLaw>(&law.law)) return p->x;
  if (const auto* s = std::get_if<ScaledLaw>(&law.law)) {
    auto base = law_point(*s->base);
    if (!base) return std::nullopt;
    return Vector(base->array() + s->shift);
  }
  return std::nullopt;
}

Vector sample_chamber(const ChamberLaw& law, int n, Rng& rng) {
  return std::visit(
      [&](const auto& v) -> Vector {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointLaw>) {
          return v.x;
        } else if constexpr (std::is_same_v<T, SortedIidLaw>) {
          Vector x(v.n);
          for (int i = 0; i < v.n; ++i) x[i] = sample_marginal(v.marginal, rng);
          std::sort(x.data(), x.data() + v.n, std::greater<double>());
          return x;
        } else {
          Vector base = sample_chamber(*v.base, n, rng);
          return Vector(base.array() + v.shift);
        }
      },
      law.law);
}

Vector sample_chamber(const BiinvariantMeasure& nu, Rng& rng) {
  check_measure(nu);
  const int c = pick_component(nu, rng);
  return sample_chamber(nu.components[static_cast<std::size_t>(c)].law, nu.n, rng);
}

SampledElement sample_group_element(const BiinvariantMeasure& nu, Rng& rng) {
  check_measure(nu);
  SampledElement out;
  out.chamber = sample_chamber(nu, rng);
  if (nu.field == Field::Real) {
    out.g = group_element_from_chamber<double>(out.chamber, rng).cast<std::complex<double>>();
  } else {
    out.g = group_element_from_chamber<std::complex<double>>(out.chamber, rng);
  }
  return out;
}

DefinitenessReport definiteness_report(const RealMatrix& sym) {
  DefinitenessReport rep;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym);
  if (es.info() != Eigen::Success)
    throw FactorizationFailure("definiteness_report: eigendecomposition failed");
  const Vector ev = es.eigenvalues();  // ascending
  const int n = static_cast<int>(ev.size());
  rep.min_eigenvalue = ev[0];
  rep.max_eigenvalue = ev[n - 1];
  const double cut = kRankRelTol * std::max(rep.max_eigenvalue, 0.0);
  rep.rank = 0;
  for (int i = 0; i < n; ++i)
    if (ev[i] > cut && ev[i] > 0.0) ++rep.rank;
  rep.positive_definite = rep.rank == n;
  if (!rep.positive_definite) rep.kernel_direction = es.eigenvectors().col(0);
  return rep;
}

MeasureMoments measure_moments(const BiinvariantMeasure& nu, std::int64_t outer_samples,
                               std::int64_t inner_samples, Seed seed, int partitions) {
  const int n = nu.n;
  const int np = n * (n + 1) / 2;
  auto fill = [n, np](const Vector& f, Vector& out) {
    for (int i = 0; i < n; ++i) out[i] = f[i];
    int idx = n;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) out[idx++] = f[i] * f[j];
    (void)np;
  };
  auto acc =
      accumulate_mixture_dispatch(nu, n + np, outer_samples, inner_samples, seed, partitions, fill);

  MeasureMoments out;
  out.outer_samples = acc.outer_used;
  out.inner_samples = acc.inner_used;
  out.exact_outer = acc.exact_outer;
  out.m1 = acc.mean.head(n);
  out.m1_se = acc.se.head(n);
  out.m1_se_outer = acc.se_outer.head(n);
  out.m1_se_inner = acc.se_inner.head(n);
  out.m2.resize(n, n);
  out.m2_se.resize(n, n);
  out.sigma2.resize(n, n);
  out.sigma2_se.resize(n, n);
  int idx = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      out.m2(i, j) = out.m2(j, i) = acc.mean[idx];
      out.m2_se(i, j) = out.m2_se(j, i) = acc.se[idx];
      out.sigma2(i, j) = out.sigma2(j, i) = acc.mean[idx] - out.m1[i] * out.m1[j];
      const double d =
          std::sqrt(acc.se[idx] * acc.se[idx] + out.m1[j] * out.m1[j] * out.m1_se[i] * out.m1_se[i] +
                    out.m1[i] * out.m1[i] * out.m1_se[j] * out.m1_se[j]);
      out.sigma2_se(i, j) = out.sigma2_se(j, i) = d;
      ++idx;
    }
  }
  out.definiteness = definiteness_report(out.sigma2);
  return out;
}

TransformDerivatives transform_derivatives(const BiinvariantMeasure& nu, double h,
                                           std::int64_t outer_samples,
                                           std::int64_t inner_samples, Seed seed, int partitions) {
  if (!(h > 0.0) || !std::isfinite(h)) throw SpecError("transform_derivatives: step must be positive");
  const int n = nu.n;
  const int np = n * (n + 1) / 2;
  // Per-sample central difference quotients of exp(-i lambda . f) at 0:
  //   first order:   [e^{-ihf_j} - e^{ihf_j}]/(2h)        = -i sin(h f_j)/h
  //   second order:  [cos(h(f_i+f_j)) - cos(h(f_i-f_j))]/(2h^2)
  //                                                        = -sin(h f_i) sin(h f_j)/h^2
  //   diagonal:      [e^{-ihf_i} - 2 + e^{ihf_i}]/h^2      = -4 sin^2(h f_i / 2)/h^2
  // All real up to the -i factor on the gradient; accumulated per sample so
  // the standard errors are those of the actual difference quotients.
  auto fill = [n, h](const Vector& f, Vector& out) {
    for (int i = 0; i < n; ++i) out[i] = std::sin(h * f[i]) / h;
    int idx = n;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        if (i == j) {
          const double s = std::sin(0.5 * h * f[i]);
          out[idx++] = -4.0 * s * s / (h * h);
        } else {
          out[idx++] = -std::sin(h * f[i]) * std::sin(h * f[j]) / (h * h);
        }
      }
    }
  };
  auto acc =
      accumulate_mixture_dispatch(nu, n + np, outer_samples, inner_samples, seed, partitions, fill);

  TransformDerivatives out;
  out.h = h;
  out.outer_samples = acc.outer_used;
  out.inner_samples = acc.inner_used;
  out.grad.resize(n);
  out.grad_se.resize(n);
  for (int i = 0; i < n; ++i) {
    out.grad[i] = std::complex<double>(0.0, -acc.mean[i]);
    out.grad_se[i] = acc.se[i];
  }
  out.hess.resize(n, n);
  out.hess_se.resize(n, n);
  int idx = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      out.hess(i, j) = out.hess(j, i) = acc.mean[idx];
      out.hess_se(i, j) = out.hess_se(j, i) = acc.se[idx];
      ++idx;
    }
  }
  return out;
}

std::vector<MCEstimateC> spherical_transform_grid(const BiinvariantMeasure& nu,
                                                  const std::vector<Vector>& lambdas,
                                                  std::int64_t outer_samples,
                                                  std::int64_t inner_samples, Seed seed,
                                                  int partitions) {
  check_measure(nu);
  if (lambdas.empty()) return {};
  for (const auto& l : lambdas)
    if (l.size() != nu.n) throw SpecError("spherical_transform: lambda dimension mismatch");
  if (inner_samples < 2) throw SpecError("spherical_transform: inner_samples must be >= 2");
  const std::size_t L = lambdas.size();
  const Seed inner_seed = derive(seed, salt::kHaarInner);

  auto run = [&](auto scalar_tag) {
    using Scalar = decltype(scalar_tag);
    std::vector<MCEstimateC> result(L);
    auto atoms = point_mixture(nu);
    if (!atoms.empty()) {
      std::vector<ProfileSampler<Scalar>> samplers;
      for (const auto& a : atoms) samplers.push_back(ProfileSampler<Scalar>::from_chamber(a.second));
      std::vector<Welford<std::complex<double>>> acc(L);
      Rng rng = make_rng(inner_seed);
      std::vector<Vector> profiles(atoms.size());
      for (std::int64_t i = 0; i < inner_samples; ++i) {
        Matrix<Scalar> k = sample_haar<Scalar>(nu.n, rng);
        for (std::size_t c = 0; c < samplers.size(); ++c) profiles[c] = samplers[c].profile(k);
        for (std::size_t l = 0; l < L; ++l) {
          std::complex<double> v(0.0, 0.0);
          for (std::size_t c = 0; c < samplers.size(); ++c) {
            const double t = lambdas[l].dot(profiles[c]);  // phi_{i rho - lambda}: exp(-i t)
            v += atoms[c].first * std::complex<double>(std::cos(t), -std::sin(t));
          }
          acc[l].push(v);
        }
      }
      for (std::size_t l = 0; l < L; ++l) result[l] = acc[l].estimate();
      return result;
    }

    if (outer_samples < 2) throw SpecError("spherical_transform: outer_samples must be >= 2");
    using RowSet = std::vector<Welford<std::complex<double>>>;
    const auto sizes = partition_sizes(outer_samples, partitions);
    std::vector<std::int64_t> offsets(sizes.size(), 0);
    for (std::size_t p = 1; p < sizes.size(); ++p) offsets[p] = offsets[p - 1] + sizes[p - 1];
    auto chunks = run_partitioned<RowSet>(
        outer_samples, partitions, derive(seed, salt::kChamberOuter),
        [&](int p, std::int64_t count, Seed chunk_seed) {
          RowSet rows(L);
          Rng outer_rng = make_rng(chunk_seed);
          Eigen::VectorXcd row_acc(static_cast<Eigen::Index>(L));
          for (std::int64_t o = 0; o < count; ++o) {
            Vector x = sample_chamber(nu, outer_rng);
            auto ps = ProfileSampler<Scalar>::from_chamber(x);
            // Private inner stream per outer draw (i.i.d. rows); the grid
            // still shares every profile across all lambdas.
            const auto row = static_cast<std::uint64_t>(offsets[static_cast<std::size_t>(p)] + o);
            Rng inner_rng = make_rng(derive(inner_seed, row));
            row_acc.setZero();
            for (std::int64_t i = 0; i < inner_samples; ++i) {
              Matrix<Scalar> k = sample_haar<Scalar>(nu.n, inner_rng);
              Vector f = ps.profile(k);
              for (std::size_t l = 0; l < L; ++l) {
                const double t = lambdas[l].dot(f);
                row_acc[static_cast<Eigen::Index>(l)] +=
                    std::complex<double>(std::cos(t), -std::sin(t));
              }
            }
            for (std::size_t l = 0; l < L; ++l)
              rows[l].push(row_acc[static_cast<Eigen::Index>(l)] /
                           static_cast<double>(inner_samples));
          }
          return rows;
        });
    RowSet rows(L);
    for (auto& ch : chunks)
      for (std::size_t l = 0; l < L; ++l) rows[l].merge(ch[l]);
    for (std::size_t l = 0; l < L; ++l) {
      result[l] = rows[l].estimate();
      result[l].samples = outer_samples * inner_samples;
    }
    return result;
  };

  return nu.field == Field::Real ? run(double{}) : run(std::complex<double>{});
}

MCEstimateC spherical_transform(const BiinvariantMeasure& nu, const Vector& lambda,
                                std::int64_t outer_samples, std::int64_t inner_samples, Seed seed,
                                int partitions) {
  return spherical_transform_grid(nu, {lambda}, outer_samples, inner_samples, seed, partitions)[0];
}

}  // namespace glwalk
