// Command line front end: spherical-function evaluation, moment summaries,
// CLT ensembles, oscillation-ratio scans and the identity verification suite.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/configuration
// errors, 3 numerical failures.  Output is deterministic for fixed flags (no
// timestamps; fixed key order; shortest-round-trip doubles in JSON, %.17g in
// CSV), so identical invocations produce byte-identical documents.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "glwalk/measures.hpp"
#include "glwalk/oscillation.hpp"
#include "glwalk/spherical.hpp"
#include "glwalk/verify.hpp"
#include "glwalk/walk.hpp"

namespace {

using json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json jvec(const glwalk::Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json jmat(const glwalk::RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

std::string join_semi(const glwalk::Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += fmt17(v[i]);
  }
  return s;
}

glwalk::Field parse_field(const std::string& name) {
  if (name == "real") return glwalk::Field::Real;
  if (name == "complex") return glwalk::Field::Complex;
  throw glwalk::SpecError("--field: expected real or complex, got '" + name + "'");
}

glwalk::Vector parse_chamber(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      vals.push_back(std::stod(tok, &pos));
      while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw glwalk::SpecError("--chamber: '" + tok + "' is not a number");
    }
  }
  if (vals.empty()) throw glwalk::SpecError("--chamber: empty list");
  glwalk::Vector x(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) x[static_cast<Eigen::Index>(i)] = vals[i];
  glwalk::check_chamber(x);
  return x;
}

// "log:LO:HI:NORMS:DIRS" (log-spaced norm shells times unit directions) or
// "list:[[l1...],[l2...]]" / bare JSON array of explicit lambda vectors.
std::vector<glwalk::Vector> parse_lambda_grid(const std::string& text, int n,
                                              glwalk::Seed seed) {
  if (text.rfind("log:", 0) == 0) {
    std::stringstream ss(text.substr(4));
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 4)
      throw glwalk::SpecError("--lambda-grid: expected log:LO:HI:NORMS:DIRS");
    try {
      return glwalk::lambda_log_grid(n, std::stod(parts[0]), std::stod(parts[1]),
                                     std::stoi(parts[2]), std::stoi(parts[3]), seed);
    } catch (const glwalk::SpecError&) {
      throw;
    } catch (const std::exception&) {
      throw glwalk::SpecError("--lambda-grid: malformed log grid '" + text + "'");
    }
  }
  std::string body = text;
  if (body.rfind("list:", 0) == 0) body = body.substr(5);
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw glwalk::SpecError(std::string("--lambda-grid: invalid JSON list: ") + e.what());
  }
  if (!doc.is_array() || doc.empty())
    throw glwalk::SpecError("--lambda-grid: expected a non-empty array of vectors");
  std::vector<glwalk::Vector> out;
  for (const auto& item : doc) {
    if (!item.is_array() || static_cast<int>(item.size()) != n)
      throw glwalk::SpecError("--lambda-grid: each lambda must have length n");
    glwalk::Vector l(n);
    for (int i = 0; i < n; ++i) {
      if (!item[static_cast<std::size_t>(i)].is_number())
        throw glwalk::SpecError("--lambda-grid: entries must be numbers");
      l[i] = item[static_cast<std::size_t>(i)].get<double>();
    }
    out.push_back(std::move(l));
  }
  return out;
}

// Path or inline JSON (inline iff the argument starts with '{').
glwalk::BiinvariantMeasure load_measure(const std::string& arg) {
  if (!arg.empty() && arg[0] == '{') return glwalk::parse_measure(arg);
  std::ifstream in(arg);
  if (!in) throw glwalk::SpecError("--measure: cannot open file '" + arg + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return glwalk::parse_measure(buf.str());
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw glwalk::SpecError("--out: cannot open '" + out_path + "' for writing");
  out << text;
}

struct CommonOpts {
  std::uint64_t seed = 12345;
  int threads = 1;
  std::string format = "json";
  std::string out;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Base RNG seed");
    cmd->add_option("--threads", threads, "Worker partitions (affects stream layout)")
        ->check(CLI::Range(1, 256));
    cmd->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", out, "Write the document here instead of stdout");
  }

  glwalk::Seed base_seed() const { return glwalk::Seed{seed, 0}; }

  void echo(json& cfg) const {
    cfg["seed"] = seed;
    cfg["threads"] = threads;
    cfg["format"] = format;
  }
};

std::string csv_header(const std::string& command, const json& cfg) {
  std::string s = "# version=" + std::string(glwalk::kVersion) + "\n# command=" + command + "\n";
  for (const auto& [key, value] : cfg.items()) {
    s += "# " + key + "=";
    if (value.is_string()) s += value.get<std::string>();
    else if (value.is_number_float()) s += fmt17(value.get<double>());
    else s += value.dump();
    s += "\n";
  }
  return s;
}

std::string render(const std::string& command, const json& cfg, const json& results,
                   const std::string& format, const std::string& csv_body) {
  if (format == "csv") return csv_header(command, cfg) + csv_body;
  json doc;
  doc["version"] = glwalk::kVersion;
  doc["command"] = command;
  doc["config"] = cfg;
  doc["results"] = results;
  return doc.dump(2) + "\n";
}

json moments_json(const glwalk::MomentSummary& ms, const glwalk::DefinitenessReport& def) {
  json r;
  r["m1"] = jvec(ms.m1);
  r["m1_se"] = jvec(ms.m1_se);
  r["m2"] = jmat(ms.m2);
  r["m2_se"] = jmat(ms.m2_se);
  r["sigma2"] = jmat(ms.sigma2);
  r["sigma2_se"] = jmat(ms.sigma2_se);
  r["log_det"] = ms.log_det;
  r["sum_identity"] = {{"mean", ms.sum_identity.mean},
                       {"std_error", ms.sum_identity.std_error},
                       {"samples", ms.sum_identity.samples}};
  r["definiteness"] = {{"positive_definite", def.positive_definite},
                       {"rank", def.rank},
                       {"min_eigenvalue", def.min_eigenvalue},
                       {"max_eigenvalue", def.max_eigenvalue},
                       {"kernel_direction", jvec(def.kernel_direction)}};
  r["samples"] = ms.samples;
  return r;
}

json measure_moments_json(const glwalk::MeasureMoments& mm) {
  json r;
  r["m1"] = jvec(mm.m1);
  r["m1_se"] = jvec(mm.m1_se);
  r["m1_se_outer"] = jvec(mm.m1_se_outer);
  r["m1_se_inner"] = jvec(mm.m1_se_inner);
  r["m2"] = jmat(mm.m2);
  r["m2_se"] = jmat(mm.m2_se);
  r["sigma2"] = jmat(mm.sigma2);
  r["sigma2_se"] = jmat(mm.sigma2_se);
  r["definiteness"] = {{"positive_definite", mm.definiteness.positive_definite},
                       {"rank", mm.definiteness.rank},
                       {"min_eigenvalue", mm.definiteness.min_eigenvalue},
                       {"max_eigenvalue", mm.definiteness.max_eigenvalue},
                       {"kernel_direction", jvec(mm.definiteness.kernel_direction)}};
  r["outer_samples"] = mm.outer_samples;
  r["inner_samples"] = mm.inner_samples;
  r["exact_outer"] = mm.exact_outer;
  return r;
}

void csv_matrix_rows(std::string& body, const std::string& section,
                     const glwalk::RealMatrix& m, const glwalk::RealMatrix& se) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      body += section + "," + std::to_string(i) + ";" + std::to_string(j) + "," +
              fmt17(m(i, j)) + "," + fmt17(se(i, j)) + "\n";
}

std::string moments_csv(const glwalk::MomentSummary& ms, const glwalk::DefinitenessReport& def) {
  std::string body = "section,index,value,std_error\n";
  for (Eigen::Index i = 0; i < ms.m1.size(); ++i)
    body += "m1," + std::to_string(i) + "," + fmt17(ms.m1[i]) + "," + fmt17(ms.m1_se[i]) + "\n";
  csv_matrix_rows(body, "m2", ms.m2, ms.m2_se);
  csv_matrix_rows(body, "sigma2", ms.sigma2, ms.sigma2_se);
  body += "log_det,," + fmt17(ms.log_det) + ",\n";
  body += "sum_identity,," + fmt17(ms.sum_identity.mean) + "," +
          fmt17(ms.sum_identity.std_error) + "\n";
  body += "rank,," + std::to_string(def.rank) + ",\n";
  body += "positive_definite,," + std::string(def.positive_definite ? "1" : "0") + ",\n";
  return body;
}

std::string measure_moments_csv(const glwalk::MeasureMoments& mm) {
  std::string body = "section,index,value,std_error\n";
  for (Eigen::Index i = 0; i < mm.m1.size(); ++i)
    body += "m1," + std::to_string(i) + "," + fmt17(mm.m1[i]) + "," + fmt17(mm.m1_se[i]) + "\n";
  csv_matrix_rows(body, "m2", mm.m2, mm.m2_se);
  csv_matrix_rows(body, "sigma2", mm.sigma2, mm.sigma2_se);
  body += "rank,," + std::to_string(mm.definiteness.rank) + ",\n";
  body += "positive_definite,," + std::string(mm.definiteness.positive_definite ? "1" : "0") +
          ",\n";
  body += "exact_outer,," + std::string(mm.exact_outer ? "1" : "0") + ",\n";
  return body;
}

// ---- subcommand drivers -----------------------------------------------------

int run_spherical(const CommonOpts& common, const std::string& field_name,
                  const std::string& chamber_text, const std::string& grid_text,
                  std::int64_t samples) {
  const glwalk::Field field = parse_field(field_name);
  const glwalk::Vector chamber = parse_chamber(chamber_text);
  const auto lambdas =
      parse_lambda_grid(grid_text, static_cast<int>(chamber.size()), common.base_seed());

  json cfg;
  cfg["field"] = field_name;
  cfg["chamber"] = jvec(chamber);
  cfg["lambda_grid"] = grid_text;
  cfg["samples"] = samples;
  common.echo(cfg);

  json points = json::array();
  std::string csv = "norm,lambda,re,im,std_error,samples\n";
  for (const auto& l : lambdas) {
    auto est = glwalk::spherical_fn(field, chamber, l, samples, common.base_seed(),
                                    common.threads);
    points.push_back({{"lambda", jvec(l)},
                      {"norm", l.norm()},
                      {"re", est.mean.real()},
                      {"im", est.mean.imag()},
                      {"std_error", est.std_error},
                      {"samples", est.samples}});
    csv += fmt17(l.norm()) + "," + join_semi(l) + "," + fmt17(est.mean.real()) + "," +
           fmt17(est.mean.imag()) + "," + fmt17(est.std_error) + "," +
           std::to_string(est.samples) + "\n";
  }
  json results;
  results["points"] = points;
  emit(render("spherical", cfg, results, common.format, csv), common.out);
  return 0;
}

int run_moments(const CommonOpts& common, const std::string& field_name,
                const std::string& chamber_text, const std::string& measure_arg,
                std::int64_t samples, std::int64_t outer) {
  if (chamber_text.empty() == measure_arg.empty())
    throw glwalk::SpecError("moments: give exactly one of --chamber or --measure");

  json cfg;
  json results;
  std::string csv;
  if (!chamber_text.empty()) {
    const glwalk::Field field = parse_field(field_name);
    const glwalk::Vector chamber = parse_chamber(chamber_text);
    cfg["field"] = field_name;
    cfg["chamber"] = jvec(chamber);
    cfg["samples"] = samples;
    common.echo(cfg);
    auto ms = glwalk::moment_summary(field, chamber, samples, common.base_seed(),
                                     common.threads);
    auto def = glwalk::definiteness_report(ms.sigma2);
    results = moments_json(ms, def);
    csv = moments_csv(ms, def);
  } else {
    auto nu = load_measure(measure_arg);
    cfg["measure"] = json::parse(glwalk::measure_to_json(nu));
    cfg["outer"] = outer;
    cfg["samples"] = samples;
    common.echo(cfg);
    auto mm = glwalk::measure_moments(nu, outer, samples, common.base_seed(), common.threads);
    results = measure_moments_json(mm);
    csv = measure_moments_csv(mm);
  }
  emit(render("moments", cfg, results, common.format, csv), common.out);
  return 0;
}

int run_clt(const CommonOpts& common, const std::string& measure_arg, std::int64_t k,
            std::int64_t trials, double statistic_tol, bool emit_t) {
  auto nu = load_measure(measure_arg);
  json cfg;
  cfg["measure"] = json::parse(glwalk::measure_to_json(nu));
  cfg["k"] = k;
  cfg["trials"] = trials;
  cfg["statistic_tol"] = statistic_tol;
  common.echo(cfg);

  auto sample = glwalk::clt_ensemble(nu, k, trials, common.base_seed(), statistic_tol,
                                     common.threads);
  auto rep = glwalk::gaussian_compare(sample);

  json results;
  results["k"] = sample.k;
  results["trials"] = trials;
  results["nu_moments"] = measure_moments_json(sample.nu_moments);
  json jr;
  jr["mean"] = jvec(rep.mean);
  jr["mean_norm"] = rep.mean_norm;
  jr["sample_cov"] = jmat(rep.sample_cov);
  jr["cov_frobenius_rel_err"] = rep.cov_frobenius_rel_err;
  jr["cov_rank"] = rep.cov_rank;
  jr["degenerate_covariance"] = rep.degenerate_covariance;
  json ks = json::array();
  for (std::size_t i = 0; i < rep.ks_statistics.size(); ++i)
    ks.push_back({{"statistic", rep.ks_statistics[i]}, {"p_value", rep.ks_p_values[i]}});
  jr["ks"] = ks;
  jr["mardia"] = {{"skewness", rep.mardia.skewness},
                  {"kurtosis", rep.mardia.kurtosis},
                  {"kurtosis_z", rep.mardia.kurtosis_z},
                  {"dimension", rep.mardia.dimension}};
  results["report"] = jr;
  if (emit_t) results["t_values"] = jmat(sample.t_values);

  std::string csv = "section,index,value\n";
  for (Eigen::Index i = 0; i < rep.mean.size(); ++i)
    csv += "mean," + std::to_string(i) + "," + fmt17(rep.mean[i]) + "\n";
  csv += "mean_norm,," + fmt17(rep.mean_norm) + "\n";
  for (Eigen::Index i = 0; i < rep.sample_cov.rows(); ++i)
    for (Eigen::Index j = 0; j < rep.sample_cov.cols(); ++j)
      csv += "sample_cov," + std::to_string(i) + ";" + std::to_string(j) + "," +
             fmt17(rep.sample_cov(i, j)) + "\n";
  csv += "cov_frobenius_rel_err,," + fmt17(rep.cov_frobenius_rel_err) + "\n";
  csv += "cov_rank,," + std::to_string(rep.cov_rank) + "\n";
  csv += "degenerate_covariance,," + std::string(rep.degenerate_covariance ? "1" : "0") + "\n";
  for (std::size_t i = 0; i < rep.ks_statistics.size(); ++i) {
    csv += "ks_statistic," + std::to_string(i) + "," + fmt17(rep.ks_statistics[i]) + "\n";
    csv += "ks_p_value," + std::to_string(i) + "," + fmt17(rep.ks_p_values[i]) + "\n";
  }
  csv += "mardia_skewness,," + fmt17(rep.mardia.skewness) + "\n";
  csv += "mardia_kurtosis_z,," + fmt17(rep.mardia.kurtosis_z) + "\n";
  if (emit_t)
    for (Eigen::Index i = 0; i < sample.t_values.rows(); ++i) {
      csv += "t," + std::to_string(i) + "," +
             join_semi(sample.t_values.row(i).transpose()) + "\n";
    }
  emit(render("clt", cfg, results, common.format, csv), common.out);
  return 0;
}

int run_osc(const CommonOpts& common, const std::string& field_name,
            const std::string& chamber_text, const std::string& grid_text,
            std::int64_t samples) {
  const glwalk::Field field = parse_field(field_name);
  const glwalk::Vector chamber = parse_chamber(chamber_text);
  const auto lambdas =
      parse_lambda_grid(grid_text, static_cast<int>(chamber.size()), common.base_seed());

  json cfg;
  cfg["field"] = field_name;
  cfg["chamber"] = jvec(chamber);
  cfg["lambda_grid"] = grid_text;
  cfg["samples"] = samples;
  common.echo(cfg);

  auto scan = glwalk::oscillation_scan(field, chamber, lambdas, samples, common.base_seed(),
                                       common.threads);
  json results;
  results["chamber"] = jvec(scan.chamber);
  results["m1_hat"] = jvec(scan.m1_hat);
  results["m1_se"] = jvec(scan.m1_se);
  results["samples"] = scan.samples;
  results["sup_ratio2"] = scan.sup_ratio2;
  results["sup_ratio2_se"] = scan.sup_ratio2_se;
  results["sup_ratio1"] = scan.sup_ratio1;
  results["sup_ratio1_se"] = scan.sup_ratio1_se;
  results["inf_ratio2_smallest_shell"] = scan.inf_ratio2_smallest_shell;
  json points = json::array();
  for (const auto& p : scan.points)
    points.push_back({{"lambda", jvec(p.lambda)},
                      {"norm", p.norm},
                      {"ratio2", p.ratio2},
                      {"ratio2_se", p.ratio2_se},
                      {"ratio1", p.ratio1},
                      {"ratio1_se", p.ratio1_se}});
  results["points"] = points;

  std::string csv = "row,norm,lambda,ratio2,ratio2_se,ratio1,ratio1_se\n";
  for (const auto& p : scan.points)
    csv += "point," + fmt17(p.norm) + "," + join_semi(p.lambda) + "," + fmt17(p.ratio2) + "," +
           fmt17(p.ratio2_se) + "," + fmt17(p.ratio1) + "," + fmt17(p.ratio1_se) + "\n";
  csv += "sup,,," + fmt17(scan.sup_ratio2) + "," + fmt17(scan.sup_ratio2_se) + "," +
         fmt17(scan.sup_ratio1) + "," + fmt17(scan.sup_ratio1_se) + "\n";
  csv += "inf_smallest_shell,,," + fmt17(scan.inf_ratio2_smallest_shell) + ",,,\n";
  emit(render("osc", cfg, results, common.format, csv), common.out);
  return 0;
}

int run_verify(const CommonOpts& common, std::int64_t instances, std::int64_t mc_samples,
               bool inject) {
  glwalk::VerifyOptions opt;
  opt.instances = instances;
  opt.mc_samples = mc_samples;
  opt.seed = common.base_seed();
  opt.partitions = common.threads;
  opt.inject_corruption = inject;

  json cfg;
  cfg["instances"] = instances;
  cfg["mc_samples"] = mc_samples;
  cfg["inject_corruption"] = inject;
  common.echo(cfg);

  auto report = glwalk::run_verification(opt);
  json results;
  results["all_passed"] = report.all_passed;
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"instances", c.instances},
                      {"failures", c.failures},
                      {"worst_residual", c.worst_residual},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed},
                      {"detail", c.detail}});
  results["checks"] = checks;

  std::string csv = "name,instances,failures,worst_residual,tolerance,passed\n";
  for (const auto& c : report.checks)
    csv += c.name + "," + std::to_string(c.instances) + "," + std::to_string(c.failures) + "," +
           fmt17(c.worst_residual) + "," + fmt17(c.tolerance) + "," + (c.passed ? "1" : "0") +
           "\n";
  emit(render("verify", cfg, results, common.format, csv), common.out);
  return report.all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spherical functions, moment maps and biinvariant random walks on GL_n"};
  app.set_version_flag("--version", std::string(glwalk::kVersion));
  app.require_subcommand(1);

  CommonOpts sph_common, mom_common, clt_common, osc_common, ver_common;

  auto* sph = app.add_subcommand("spherical", "Evaluate the spherical function on a lambda grid");
  std::string sph_field = "real", sph_chamber, sph_grid;
  std::int64_t sph_samples = 10000;
  sph->add_option("--field", sph_field, "Base field (real|complex)");
  sph->add_option("--chamber", sph_chamber, "Chamber point x = 2 ln sigma(g), descending")
      ->required();
  sph->add_option("--lambda-grid", sph_grid, "log:LO:HI:NORMS:DIRS or list:[[...],...]")
      ->required();
  sph->add_option("--samples", sph_samples, "Monte Carlo samples per lambda");
  sph_common.attach(sph);

  auto* mom = app.add_subcommand("moments", "Drift vector, second moments and covariance");
  std::string mom_field = "real", mom_chamber, mom_measure;
  std::int64_t mom_samples = 100000, mom_outer = 512;
  mom->add_option("--field", mom_field, "Base field (real|complex)");
  mom->add_option("--chamber", mom_chamber, "Chamber point of a single group element");
  mom->add_option("--measure", mom_measure, "Measure JSON (path, or inline starting with '{')");
  mom->add_option("--samples", mom_samples, "Haar samples (inner samples for a measure)");
  mom->add_option("--outer", mom_outer, "Outer chamber draws for non-point measures");
  mom_common.attach(mom);

  auto* clt = app.add_subcommand("clt", "Normalized walk ensemble against its Gaussian limit");
  std::string clt_measure;
  std::int64_t clt_k = 200, clt_trials = 1000;
  double clt_tol = 0.01;
  bool clt_emit_t = false;
  clt->add_option("--measure", clt_measure, "Step measure JSON (path or inline)")->required();
  clt->add_option("--k", clt_k, "Walk length");
  clt->add_option("--trials", clt_trials, "Independent walks");
  clt->add_option("--statistic-tol", clt_tol, "Target se(m1) * sqrt(k) for the centering");
  clt->add_flag("--emit-t", clt_emit_t, "Include the raw normalized statistics");
  clt_common.attach(clt);

  auto* osc = app.add_subcommand("osc", "Oscillation-ratio scan of the spherical function");
  std::string osc_field = "real", osc_chamber, osc_grid = "log:0.001:10:40:8";
  std::int64_t osc_samples = 20000;
  osc->add_option("--field", osc_field, "Base field (real|complex)");
  osc->add_option("--chamber", osc_chamber, "Chamber point x = 2 ln sigma(g), descending")
      ->required();
  osc->add_option("--lambda-grid", osc_grid, "log:LO:HI:NORMS:DIRS or list:[[...],...]");
  osc->add_option("--samples", osc_samples, "Shared Monte Carlo samples for the whole grid");
  osc_common.attach(osc);

  auto* ver = app.add_subcommand("verify", "Randomized checks of the matrix identities");
  std::int64_t ver_instances = 1000, ver_mc = 200000;
  bool ver_inject = false;
  ver->add_option("--instances", ver_instances, "Random instances per identity");
  ver->add_option("--mc-samples", ver_mc, "Samples for the negative-moment integral");
  ver->add_flag("--inject-corruption", ver_inject, "Corrupt one instance (self-test)")
      ->group("");
  ver_common.attach(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sph->parsed())
      return run_spherical(sph_common, sph_field, sph_chamber, sph_grid, sph_samples);
    if (mom->parsed())
      return run_moments(mom_common, mom_field, mom_chamber, mom_measure, mom_samples,
                         mom_outer);
    if (clt->parsed())
      return run_clt(clt_common, clt_measure, clt_k, clt_trials, clt_tol, clt_emit_t);
    if (osc->parsed()) return run_osc(osc_common, osc_field, osc_chamber, osc_grid, osc_samples);
    if (ver->parsed()) return run_verify(ver_common, ver_instances, ver_mc, ver_inject);
  } catch (const glwalk::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}
