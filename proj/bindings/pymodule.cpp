// Python bindings: thin functional veneer over the C++ core.  Measures cross
// the boundary as JSON strings (same schema as the CLI), matrices as numpy
// arrays, results as plain dicts.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "glwalk/measures.hpp"
#include "glwalk/oscillation.hpp"
#include "glwalk/spherical.hpp"
#include "glwalk/verify.hpp"
#include "glwalk/walk.hpp"

namespace py = pybind11;
using namespace glwalk;

namespace {

Field field_of(const std::string& name) {
  if (name == "real") return Field::Real;
  if (name == "complex") return Field::Complex;
  throw SpecError("field: expected 'real' or 'complex', got '" + name + "'");
}

Seed seed_of(std::uint64_t value) { return Seed{value, 0}; }

py::dict definiteness_dict(const DefinitenessReport& d) {
  py::dict out;
  out["positive_definite"] = d.positive_definite;
  out["rank"] = d.rank;
  out["min_eigenvalue"] = d.min_eigenvalue;
  out["max_eigenvalue"] = d.max_eigenvalue;
  out["kernel_direction"] = d.kernel_direction;
  return out;
}

py::dict measure_moments_dict(const MeasureMoments& mm) {
  py::dict out;
  out["m1"] = mm.m1;
  out["m1_se"] = mm.m1_se;
  out["m1_se_outer"] = mm.m1_se_outer;
  out["m1_se_inner"] = mm.m1_se_inner;
  out["m2"] = mm.m2;
  out["m2_se"] = mm.m2_se;
  out["sigma2"] = mm.sigma2;
  out["sigma2_se"] = mm.sigma2_se;
  out["definiteness"] = definiteness_dict(mm.definiteness);
  out["outer_samples"] = mm.outer_samples;
  out["inner_samples"] = mm.inner_samples;
  out["exact_outer"] = mm.exact_outer;
  return out;
}

}  // namespace

PYBIND11_MODULE(_glwalk, m) {
  m.doc() = "Spherical functions, moment functions and biinvariant random walks on GL_n";
  m.attr("__version__") = kVersion;

  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<NumericalBlowup>(m, "NumericalBlowup", PyExc_ArithmeticError);

  m.def("sample_haar", [](const std::string& field, int n, std::uint64_t seed) -> py::object {
    Rng rng = make_rng(seed_of(seed));
    if (field_of(field) == Field::Real) return py::cast(sample_haar_real(n, rng));
    return py::cast(sample_haar_complex(n, rng));
  }, py::arg("field"), py::arg("n"), py::arg("seed"));

  m.def("spherical_fn",
        [](const std::string& field, const Vector& chamber, const Vector& lam,
           std::int64_t samples, std::uint64_t seed, int partitions) {
          auto est = spherical_fn(field_of(field), chamber, lam, samples, seed_of(seed),
                                  partitions);
          py::dict out;
          out["mean"] = est.mean;
          out["std_error"] = est.std_error;
          out["samples"] = est.samples;
          return out;
        },
        py::arg("field"), py::arg("chamber"), py::arg("lam"), py::arg("samples"),
        py::arg("seed"), py::arg("partitions") = 1);

  m.def("moment_fn",
        [](const std::string& field, const Vector& chamber, const Eigen::VectorXi& index,
           std::int64_t samples, std::uint64_t seed, int partitions) {
          auto est = moment_fn(field_of(field), chamber, index, samples, seed_of(seed),
                               partitions);
          py::dict out;
          out["mean"] = est.mean;
          out["std_error"] = est.std_error;
          out["samples"] = est.samples;
          return out;
        },
        py::arg("field"), py::arg("chamber"), py::arg("index"), py::arg("samples"),
        py::arg("seed"), py::arg("partitions") = 1);

  m.def("moment_summary",
        [](const std::string& field, const Vector& chamber, std::int64_t samples,
           std::uint64_t seed, int partitions) {
          auto ms = moment_summary(field_of(field), chamber, samples, seed_of(seed), partitions);
          py::dict out;
          out["m1"] = ms.m1;
          out["m1_se"] = ms.m1_se;
          out["m2"] = ms.m2;
          out["m2_se"] = ms.m2_se;
          out["sigma2"] = ms.sigma2;
          out["sigma2_se"] = ms.sigma2_se;
          out["log_det"] = ms.log_det;
          out["sum_identity_mean"] = ms.sum_identity.mean;
          out["sum_identity_std_error"] = ms.sum_identity.std_error;
          out["samples"] = ms.samples;
          out["definiteness"] = definiteness_dict(definiteness_report(ms.sigma2));
          return out;
        },
        py::arg("field"), py::arg("chamber"), py::arg("samples"), py::arg("seed"),
        py::arg("partitions") = 1);

  m.def("normalize_measure",
        [](const std::string& measure_json) { return measure_to_json(parse_measure(measure_json)); },
        py::arg("measure_json"));

  m.def("measure_moments",
        [](const std::string& measure_json, std::int64_t outer, std::int64_t inner,
           std::uint64_t seed, int partitions) {
          return measure_moments_dict(
              measure_moments(parse_measure(measure_json), outer, inner, seed_of(seed),
                              partitions));
        },
        py::arg("measure_json"), py::arg("outer"), py::arg("inner"), py::arg("seed"),
        py::arg("partitions") = 1);

  m.def("spherical_transform",
        [](const std::string& measure_json, const Vector& lam, std::int64_t outer,
           std::int64_t inner, std::uint64_t seed, int partitions) {
          auto est = spherical_transform(parse_measure(measure_json), lam, outer, inner,
                                         seed_of(seed), partitions);
          py::dict out;
          out["mean"] = est.mean;
          out["std_error"] = est.std_error;
          out["samples"] = est.samples;
          return out;
        },
        py::arg("measure_json"), py::arg("lam"), py::arg("outer"), py::arg("inner"),
        py::arg("seed"), py::arg("partitions") = 1);

  m.def("transform_derivatives",
        [](const std::string& measure_json, double h, std::int64_t outer, std::int64_t inner,
           std::uint64_t seed, int partitions) {
          auto d = transform_derivatives(parse_measure(measure_json), h, outer, inner,
                                         seed_of(seed), partitions);
          py::dict out;
          out["h"] = d.h;
          out["grad"] = d.grad;
          out["grad_se"] = d.grad_se;
          out["hess"] = d.hess;
          out["hess_se"] = d.hess_se;
          out["outer_samples"] = d.outer_samples;
          out["inner_samples"] = d.inner_samples;
          return out;
        },
        py::arg("measure_json"), py::arg("h"), py::arg("outer"), py::arg("inner"),
        py::arg("seed"), py::arg("partitions") = 1);

  m.def("run_walk",
        [](const std::string& measure_json, const std::vector<std::int64_t>& checkpoints,
           std::uint64_t seed) {
          auto traj = run_walk(parse_measure(measure_json), checkpoints, seed_of(seed));
          RealMatrix chambers(static_cast<Eigen::Index>(traj.chambers.size()),
                              traj.chambers.empty() ? 0 : traj.chambers[0].size());
          for (std::size_t i = 0; i < traj.chambers.size(); ++i)
            chambers.row(static_cast<Eigen::Index>(i)) = traj.chambers[i].transpose();
          py::dict out;
          out["checkpoints"] = traj.checkpoints;
          out["chambers"] = chambers;
          out["chamber_sums"] = traj.chamber_sums;
          return out;
        },
        py::arg("measure_json"), py::arg("checkpoints"), py::arg("seed"));

  m.def("clt_ensemble",
        [](const std::string& measure_json, std::int64_t k, std::int64_t trials,
           std::uint64_t seed, double statistic_tol, int partitions) {
          auto s = clt_ensemble(parse_measure(measure_json), k, trials, seed_of(seed),
                                statistic_tol, partitions);
          py::dict out;
          out["k"] = s.k;
          out["t_values"] = s.t_values;
          out["nu_moments"] = measure_moments_dict(s.nu_moments);
          return out;
        },
        py::arg("measure_json"), py::arg("k"), py::arg("trials"), py::arg("seed"),
        py::arg("statistic_tol") = 0.01, py::arg("partitions") = 1);

  m.def("gaussian_compare",
        [](const RealMatrix& t_values, const RealMatrix& sigma2) {
          auto rep = gaussian_compare(t_values, sigma2);
          py::dict out;
          out["mean"] = rep.mean;
          out["mean_norm"] = rep.mean_norm;
          out["sample_cov"] = rep.sample_cov;
          out["cov_frobenius_rel_err"] = rep.cov_frobenius_rel_err;
          out["cov_rank"] = rep.cov_rank;
          out["degenerate_covariance"] = rep.degenerate_covariance;
          out["ks_statistics"] = rep.ks_statistics;
          out["ks_p_values"] = rep.ks_p_values;
          py::dict mardia;
          mardia["skewness"] = rep.mardia.skewness;
          mardia["kurtosis"] = rep.mardia.kurtosis;
          mardia["kurtosis_z"] = rep.mardia.kurtosis_z;
          mardia["dimension"] = rep.mardia.dimension;
          out["mardia"] = mardia;
          return out;
        },
        py::arg("t_values"), py::arg("sigma2"));

  m.def("lambda_log_grid",
        [](int n, double lo, double hi, int norms, int directions, std::uint64_t seed) {
          return lambda_log_grid(n, lo, hi, norms, directions, seed_of(seed));
        },
        py::arg("n"), py::arg("lo"), py::arg("hi"), py::arg("norms"), py::arg("directions"),
        py::arg("seed"));

  m.def("oscillation_scan",
        [](const std::string& field, const Vector& chamber,
           const std::vector<Vector>& lambdas, std::int64_t samples, std::uint64_t seed,
           int partitions) {
          auto scan = oscillation_scan(field_of(field), chamber, lambdas, samples,
                                       seed_of(seed), partitions);
          const auto L = static_cast<Eigen::Index>(scan.points.size());
          Vector norms(L), r2(L), r2se(L), r1(L), r1se(L);
          RealMatrix lam(L, chamber.size());
          for (Eigen::Index i = 0; i < L; ++i) {
            const auto& p = scan.points[static_cast<std::size_t>(i)];
            norms[i] = p.norm;
            r2[i] = p.ratio2;
            r2se[i] = p.ratio2_se;
            r1[i] = p.ratio1;
            r1se[i] = p.ratio1_se;
            lam.row(i) = p.lambda.transpose();
          }
          py::dict out;
          out["lambdas"] = lam;
          out["norms"] = norms;
          out["ratio2"] = r2;
          out["ratio2_se"] = r2se;
          out["ratio1"] = r1;
          out["ratio1_se"] = r1se;
          out["sup_ratio2"] = scan.sup_ratio2;
          out["sup_ratio2_se"] = scan.sup_ratio2_se;
          out["sup_ratio1"] = scan.sup_ratio1;
          out["sup_ratio1_se"] = scan.sup_ratio1_se;
          out["inf_ratio2_smallest_shell"] = scan.inf_ratio2_smallest_shell;
          out["m1_hat"] = scan.m1_hat;
          out["m1_se"] = scan.m1_se;
          out["samples"] = scan.samples;
          return out;
        },
        py::arg("field"), py::arg("chamber"), py::arg("lambdas"), py::arg("samples"),
        py::arg("seed"), py::arg("partitions") = 1);

  m.def("run_verification",
        [](std::int64_t instances, std::int64_t mc_samples, std::uint64_t seed,
           bool inject_corruption, int partitions) {
          VerifyOptions opt;
          opt.instances = instances;
          opt.mc_samples = mc_samples;
          opt.seed = seed_of(seed);
          opt.partitions = partitions;
          opt.inject_corruption = inject_corruption;
          auto rep = run_verification(opt);
          py::list checks;
          for (const auto& c : rep.checks) {
            py::dict d;
            d["name"] = c.name;
            d["instances"] = c.instances;
            d["failures"] = c.failures;
            d["worst_residual"] = c.worst_residual;
            d["tolerance"] = c.tolerance;
            d["passed"] = c.passed;
            d["detail"] = c.detail;
            checks.append(d);
          }
          py::dict out;
          out["all_passed"] = rep.all_passed;
          out["checks"] = checks;
          return out;
        },
        py::arg("instances") = 1000, py::arg("mc_samples") = 200000, py::arg("seed") = 12345,
        py::arg("inject_corruption") = false, py::arg("partitions") = 1);

  m.def("rho", [](const std::string& field, int n) { return rho(field_of(field), n); },
        py::arg("field"), py::arg("n"));
}
