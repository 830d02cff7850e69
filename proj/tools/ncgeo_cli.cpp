// Command-line front end: every subcommand writes a machine-readable JSON
// report (stdout by default) whose numeric checks carry the tolerance they
// were tested against. Exit codes: 0 success, 1 computation failed,
// 2 bad input.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "ncgeo/bundle.hpp"
#include "ncgeo/connections.hpp"
#include "ncgeo/forms.hpp"
#include "ncgeo/lattice.hpp"
#include "ncgeo/lecomte.hpp"
#include "ncgeo/lie_basis.hpp"
#include "ncgeo/reduction.hpp"
#include "ncgeo/serialize.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using ncgeo::Json;

struct BadInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ComputationFailed : std::runtime_error {
  Json report;  // best-so-far results, emitted alongside the error
  explicit ComputationFailed(const std::string& what, Json r = {})
      : std::runtime_error(what), report(std::move(r)) {}
};

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw BadInput(std::string("malformed JSON: ") + e.what());
  }
}

Json report_skeleton(const std::string& subcommand, std::uint64_t seed) {
  Json report;
  report["tool"] = "ncgeo";
  report["version"] = kVersion;
  report["subcommand"] = subcommand;
  report["seed"] = seed;
  report["residuals"] = Json::object();
  return report;
}

void add_residual(Json& report, const std::string& name, double value,
                  double tolerance) {
  report["residuals"][name] = {{"value", value}, {"tolerance", tolerance}};
}

void emit(const Json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw BadInput("cannot write " + out_path);
    out << report.dump(2) << "\n";
  }
}

// ---- subcommand bodies -------------------------------------------------------

Json run_basis(int n, std::uint64_t seed) {
  auto basis = ncgeo::build_su_basis(n);
  Json report = report_skeleton("basis", seed);
  report["config"] = {{"n", n}};
  report["results"]["basis"] = ncgeo::to_json(*basis);
  add_residual(report, "closure", basis->closure_residual(), 1e-12);
  return report;
}

Json run_cohomology(int n, std::uint64_t seed) {
  auto basis = ncgeo::build_su_basis(n);
  Json report = report_skeleton("cohomology", seed);
  report["config"] = {{"n", n}};
  report["results"]["dimensions"] = ncgeo::cohomology_dims(basis);
  return report;
}

Json run_curvature(const std::string& input, std::uint64_t seed) {
  const ncgeo::ConnectionForm conn = ncgeo::connection_from_json(load_json(input));
  Json report = report_skeleton("curvature", seed);
  report["config"] = {{"input", input}, {"n", conn.basis->n}, {"r", conn.r}};
  const ncgeo::MatrixForm f = ncgeo::curvature(conn);
  report["results"]["curvature"] = ncgeo::to_json(f);
  report["results"]["flat"] = f.norm() <= 1e-12;
  add_residual(report, "curvature_norm", f.norm(), 1e-12);
  const auto compat = ncgeo::check_hermitean_compat(conn);
  report["results"]["hermitean_compatible"] = compat.compatible;
  add_residual(report, "hermitean_compatibility", compat.residual, 1e-10);
  return report;
}

Json run_classify_flat(int r, std::uint64_t seed) {
  auto basis = ncgeo::build_su_basis(2);
  const auto orbits = ncgeo::classify_flat(r, basis);
  Json report = report_skeleton("classify-flat", seed);
  report["config"] = {{"r", r}, {"n", 2}};
  report["results"]["orbit_count"] = orbits.size();
  Json list = Json::array();
  double worst = 0.0;
  for (const auto& orbit : orbits) {
    Json o;
    o["label"] = orbit.label;
    o["partition"] = orbit.partition;
    o["representative"] = ncgeo::to_json(orbit.representative);
    const double res = ncgeo::curvature(orbit.representative).norm();
    o["curvature_residual"] = res;
    worst = std::max(worst, res);
    list.push_back(std::move(o));
  }
  report["results"]["orbits"] = std::move(list);
  add_residual(report, "max_curvature", worst, 1e-12);
  return report;
}

Json run_ymh(const std::string& config_path, const std::string& trace_path,
             std::uint64_t cli_seed) {
  const Json cfg = load_json(config_path);
  const int n = cfg.value("n", 2);
  const int d = cfg.value("d", 2);
  const int sites = cfg.value("N", 4);
  const double h = cfg.value("h", 1.0);
  const double mass = cfg.value("m", 1.0);
  const std::uint64_t seed = cfg.value("seed", cli_seed);
  const Json init = cfg.value("init", Json{{"type", "perturbed-b"}});

  auto basis = ncgeo::build_su_basis(n);
  ncgeo::Lattice lat(d, sites, h);
  ncgeo::Rng rng(seed);
  ncgeo::FieldConfig f0 = ncgeo::FieldConfig::zero(lat, basis, mass);
  const std::string type = init.value("type", "perturbed-b");
  if (type == "constant-b") {
    f0 = ncgeo::FieldConfig::constant_b(lat, basis, mass, init.value("t", 1.0));
  } else if (type == "perturbed-b") {
    f0 = ncgeo::FieldConfig::constant_b(lat, basis, mass, init.value("t", 0.9));
    const double noise = init.value("noise", 0.01);
    for (auto& m : f0.b) m += rng.hermitian(n, noise);
  } else if (type == "random") {
    const double amp = init.value("amplitude", 0.5);
    for (auto& m : f0.a) m = rng.antihermitian_traceless(n, amp);
    for (auto& m : f0.b) m = rng.hermitian(n, amp);
  } else {
    throw BadInput("unknown init type: " + type);
  }

  ncgeo::MinimizeOptions opts;
  opts.max_steps = cfg.value("steps", 5000);
  opts.action_tol = cfg.value("action_tol", 1e-9);
  opts.gradient_tol = cfg.value("gradient_tol", 1e-9);
  opts.optimize_a = cfg.value("optimize_a", false);
  opts.optimize_b = cfg.value("optimize_b", true);
  const auto res = ncgeo::minimize(f0, opts);

  if (!trace_path.empty()) {
    std::ofstream trace(trace_path);
    if (!trace) throw BadInput("cannot write " + trace_path);
    trace << "step,action,gradient_norm\n";
    for (const auto& p : res.trace)
      trace << p.step << "," << p.action << "," << p.gradient_norm << "\n";
  }

  Json report = report_skeleton("ymh-minimize", seed);
  report["config"] = cfg;
  report["results"]["converged"] = res.converged;
  report["results"]["final_action"] = res.final_action;
  report["results"]["final_gradient_norm"] = res.final_gradient_norm;
  report["results"]["representation_class"] = res.rep_class;
  report["results"]["steps"] = res.trace.empty() ? 0 : res.trace.back().step;
  add_residual(report, "final_action", res.final_action, opts.action_tol * 10);
  add_residual(report, "representation_defect", res.rep_residual, 1e-3);
  if (!res.converged)
    throw ComputationFailed("minimization did not converge within budget", report);
  return report;
}

Json run_bundle_check(const std::string& descriptor, std::uint64_t cli_seed) {
  const Json cfg = load_json(descriptor);
  const std::string instance = cfg.value("instance", "sphere");
  const std::uint64_t seed = cfg.value("seed", cli_seed);
  ncgeo::ChartedBundle bundle;
  // Finite-difference-limited tolerances hold at the reference resolution
  // (grid step pi/384 with the 4th-order stencil) and scale as h^4.
  const double h_ref = M_PI / 384.0;
  double tol_fd = 1e-8;
  if (instance == "circle") {
    bundle = ncgeo::circle_bundle(cfg.value("P", 256), cfg.value("B", 8),
                                  cfg.value("winding", 1), seed);
  } else if (instance == "sphere") {
    const int L = cfg.value("L", 192), B = cfg.value("B", 24),
              P = cfg.value("P", 768);
    bundle = ncgeo::sphere_bundle(L, B, P, cfg.value("winding", 1),
                                  cfg.value("theta_amp", 0.3), seed);
    const double h = std::max(M_PI / (2.0 * L), 2.0 * M_PI / P);
    tol_fd = 1e-8 * std::max(1.0, std::pow(h / h_ref, 4));
  } else {
    throw BadInput("unknown instance: " + instance);
  }
  const int pairs = cfg.value("pairs", 20);

  Json report = report_skeleton("bundle-check", seed);
  report["config"] = cfg;

  double glue = 0.0, trace = 0.0, herm = 0.0;
  for (int trial = 0; trial < pairs; ++trial) {
    const auto conn = ncgeo::random_connection(bundle, seed + 2 * trial + 1);
    const auto X = ncgeo::random_vector_field(bundle, seed + 40001 + trial);
    const auto dv = ncgeo::random_derivation(bundle, X, seed + 80001 + trial, true);
    const auto alpha = ncgeo::alpha_eval(bundle, conn, dv);
    glue = std::max(glue, ncgeo::section_residual(bundle, alpha));
    for (const auto& m : alpha.a1) {
      trace = std::max(trace, std::abs(m.trace()));
      herm = std::max(herm, ncgeo::max_abs(m + m.adjoint()));
    }
  }
  add_residual(report, "alpha_gluing", glue, 1e-10);
  add_residual(report, "alpha_trace", trace, 1e-12);
  add_residual(report, "alpha_antihermitean", herm, 1e-12);

  const auto conn = ncgeo::smooth_connection(bundle, seed + 5, 0.2);
  const auto X = ncgeo::smooth_vector_field(bundle, seed + 7);
  const auto Y = ncgeo::smooth_vector_field(bundle, seed + 11);
  const auto d1 = ncgeo::random_derivation(bundle, X, seed + 13);
  const auto d2 = ncgeo::random_derivation(bundle, Y, seed + 17);
  const auto f = ncgeo::global_curvature(bundle, conn, d1, d2);
  const auto d1b = ncgeo::random_derivation(bundle, X, seed + 19);
  const auto d2b = ncgeo::random_derivation(bundle, Y, seed + 23);
  const auto fb = ncgeo::global_curvature(bundle, conn, d1b, d2b);
  add_residual(report, "curvature_horizontality",
               ncgeo::masked_difference(bundle, f, fb), 1e-10);
  add_residual(report, "curvature_gluing",
               ncgeo::masked_overlap_residual(bundle, f), tol_fd);

  const auto u = ncgeo::smooth_gauge_section(bundle, seed + 29, 0.15);
  const auto conn_u = ncgeo::gauge_transform_alpha(bundle, u, conn);
  const auto fu = ncgeo::global_curvature(bundle, conn_u, d1, d2);
  ncgeo::GluedSection expect = f;
  for (std::size_t i = 0; i < expect.a1.size(); ++i)
    expect.a1[i] = u.v1[i].adjoint() * f.a1[i] * u.v1[i];
  for (std::size_t i = 0; i < expect.a2.size(); ++i)
    expect.a2[i] = u.v2[i].adjoint() * f.a2[i] * u.v2[i];
  add_residual(report, "curvature_gauge_covariance",
               ncgeo::masked_difference(bundle, fu, expect), tol_fd);

  for (const auto& [name, entry] : report["residuals"].items())
    if (entry["value"].get<double>() > entry["tolerance"].get<double>())
      throw ComputationFailed("residual above tolerance: " + name, report);
  return report;
}

Json run_lecomte(const std::string& sequence_path, std::uint64_t seed) {
  const Json cfg = load_json(sequence_path);
  const ncgeo::LieSES s = ncgeo::ses_from_json(cfg);
  ncgeo::Splitting phi = ncgeo::Splitting::natural(s);
  if (cfg.contains("lambda"))
    phi = ncgeo::Splitting::perturbed(
        s, ncgeo::real_matrix_from_json(cfg.at("lambda")));

  Json report = report_skeleton("lecomte", seed);
  report["config"] = cfg;
  const ncgeo::Cochain r = ncgeo::lecomte_obstruction(s, phi);
  Json rterms = Json::array();
  for (const auto& [mask, v] : r.c) {
    Json term;
    Json idx = Json::array();
    for (int k = 0; k < s.h_dim(); ++k)
      if (mask & (1u << k)) idx.push_back(k);
    term["indices"] = idx;
    Json vals = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) vals.push_back(v(i));
    term["value"] = vals;
    rterms.push_back(term);
  }
  report["results"]["obstruction"] = rterms;
  add_residual(report, "ideal_membership",
               ncgeo::ideal_membership_residual(s, r), 1e-12);
  add_residual(report, "bianchi", ncgeo::bianchi_residual(s, phi), 1e-12);

  // degree-1 polynomials adapted to the sequence: ad-invariant functionals
  const auto funcs = ncgeo::invariant_functionals(s);
  const int p_index = cfg.value("polynomial_index", 0);
  if (p_index < 0 || (p_index > 0 && p_index >= static_cast<int>(funcs.size())))
    throw BadInput("polynomial_index out of range");
  const auto P = funcs.empty()
                     ? ncgeo::functional_polynomial(
                           ncgeo::RealVector::Zero(s.i_dim))
                     : ncgeo::functional_polynomial(funcs[p_index]);
  report["results"]["invariant_functional_count"] = funcs.size();
  const ncgeo::Cochain alpha = ncgeo::characteristic_form(P, s, phi);
  Json aterms = Json::array();
  for (const auto& [mask, v] : alpha.c) {
    Json term;
    Json idx = Json::array();
    for (int k = 0; k < s.h_dim(); ++k)
      if (mask & (1u << k)) idx.push_back(k);
    term["indices"] = idx;
    term["value"] = v(0);
    aterms.push_back(term);
  }
  report["results"]["characteristic_form"] = aterms;
  add_residual(report, "closedness",
               ncgeo::chevalley_d(s.quotient(), alpha).norm(), 1e-12);
  return report;
}

Json run_chern(const std::string& field_path, int q, std::uint64_t seed) {
  const Json cfg = load_json(field_path);
  ncgeo::CurvatureSamples data;
  Json report = report_skeleton("chern", seed);
  report["config"] = cfg;
  report["config"]["q"] = q;
  if (cfg.value("type", "") == "instanton") {
    const int M = cfg.value("samples", 400);
    const double R = cfg.value("radius", 8.0);
    const double rho = cfg.value("rho", 1.0);
    data = ncgeo::instanton_radial_samples(M, R, rho);
    report["results"]["truncated_oracle"] =
        ncgeo::instanton_number_truncated(R, rho);
  } else {
    data = ncgeo::curvature_samples_from_json(cfg);
  }
  const double value = ncgeo::chern_weil_number(data, q);
  report["results"]["chern_number"] = value;
  if (report["results"].contains("truncated_oracle"))
    add_residual(report, "quadrature_error",
                 std::abs(value - report["results"]["truncated_oracle"].get<double>()),
                 1e-2);
  return report;
}

Json run_reduce(const std::string& data_path, std::uint64_t seed) {
  const Json cfg = load_json(data_path);
  const ncgeo::ReductionData rd = ncgeo::reduction_from_json(cfg);
  Json report = report_skeleton("reduce", seed);
  report["config"] = cfg;

  const auto w = ncgeo::centralizer_W(rd);
  report["results"]["centralizer_dim"] = w.size();
  Json wjson = Json::array();
  for (const auto& m : w) wjson.push_back(ncgeo::to_json(m));
  report["results"]["centralizer_basis"] = wjson;
  add_residual(report, "centralizer_closure",
               ncgeo::algebra_closure_residual(w, rd.n), 1e-10);

  const auto f = ncgeo::invariant_maps_F(rd);
  report["results"]["invariant_maps_dim"] = f.size();
  Json fjson = Json::array();
  for (const auto& map : f) {
    Json images = Json::array();
    for (const auto& m : map.images) images.push_back(ncgeo::to_json(m));
    fjson.push_back(images);
  }
  report["results"]["invariant_maps_basis"] = fjson;

  ncgeo::PointAction act;
  act.kz.dim = 0;
  if (cfg.contains("point_action"))
    act = ncgeo::point_action_from_json(cfg.at("point_action"));
  const auto dims = ncgeo::reduced_space_dims(rd, act);
  report["results"]["basic_one_forms"] = dims.basic_one_forms;
  report["results"]["invariant_maps_after_kz"] = dims.invariant_maps;
  return report;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"derivation-based noncommutative geometry toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::uint64_t seed = ncgeo::default_seed;
  std::string out_path;
  app.add_option("--seed", seed, "seed for every randomized step");
  app.add_option("--out", out_path, "write the JSON report to this file");

  int basis_n = 2, coh_n = 2, flat_r = 2, chern_q = 2;
  std::string input, config, descriptor, sequence, field, data;
  std::string trace_path;

  auto* basis_cmd = app.add_subcommand("basis", "hermitean sl(n) basis data");
  basis_cmd->add_option("--n", basis_n, "matrix size")->required();

  auto* coh_cmd = app.add_subcommand("cohomology", "cohomology dimensions");
  coh_cmd->add_option("--n", coh_n, "matrix size")->required();

  auto* curv_cmd = app.add_subcommand("curvature", "curvature of a connection");
  curv_cmd->add_option("--input", input, "connection JSON")->required();

  auto* flat_cmd = app.add_subcommand("classify-flat", "flat gauge orbits");
  flat_cmd->add_option("--r", flat_r, "module dimension")->required();

  auto* ymh_cmd = app.add_subcommand("ymh-minimize", "lattice vacuum search");
  ymh_cmd->add_option("--config", config, "run configuration JSON")->required();
  ymh_cmd->add_option("--trace", trace_path, "CSV action trace path");

  auto* bundle_cmd = app.add_subcommand("bundle-check", "two-chart residual report");
  bundle_cmd->add_option("--descriptor", descriptor, "bundle descriptor JSON")
      ->required();

  auto* lecomte_cmd = app.add_subcommand("lecomte", "sequence characteristic data");
  lecomte_cmd->add_option("--sequence", sequence, "structure tensor JSON")
      ->required();

  auto* chern_cmd = app.add_subcommand("chern", "Chern number from samples");
  chern_cmd->add_option("--field", field, "curvature samples JSON")->required();
  chern_cmd->add_option("--q", chern_q, "characteristic class degree");

  auto* reduce_cmd = app.add_subcommand("reduce", "symmetric reduction dimensions");
  reduce_cmd->add_option("--data", data, "reduction data JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Json err;
    err["error"] = {{"code", "bad-arguments"}, {"message", e.what()}};
    std::cout << err.dump(2) << "\n";
    return 2;
  }

  try {
    Json report;
    if (basis_cmd->parsed()) report = run_basis(basis_n, seed);
    else if (coh_cmd->parsed()) report = run_cohomology(coh_n, seed);
    else if (curv_cmd->parsed()) report = run_curvature(input, seed);
    else if (flat_cmd->parsed()) report = run_classify_flat(flat_r, seed);
    else if (ymh_cmd->parsed()) report = run_ymh(config, trace_path, seed);
    else if (bundle_cmd->parsed()) report = run_bundle_check(descriptor, seed);
    else if (lecomte_cmd->parsed()) report = run_lecomte(sequence, seed);
    else if (chern_cmd->parsed()) report = run_chern(field, chern_q, seed);
    else if (reduce_cmd->parsed()) report = run_reduce(data, seed);
    emit(report, out_path);
    return 0;
  } catch (const BadInput& e) {
    Json err;
    err["error"] = {{"code", "bad-input"}, {"message", e.what()}};
    std::cout << err.dump(2) << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    Json err;
    err["error"] = {{"code", "bad-input"}, {"message", e.what()}};
    std::cout << err.dump(2) << "\n";
    return 2;
  } catch (const ncgeo::capacity_error& e) {
    Json err;
    err["error"] = {{"code", "capacity"}, {"message", e.what()}};
    std::cout << err.dump(2) << "\n";
    return 1;
  } catch (const ComputationFailed& e) {
    Json err = e.report;
    err["error"] = {{"code", "computation-failed"}, {"message", e.what()}};
    try {
      emit(err, out_path);
    } catch (...) {
      std::cout << err.dump(2) << "\n";
    }
    return 1;
  } catch (const std::exception& e) {
    Json err;
    err["error"] = {{"code", "internal"}, {"message", e.what()}};
    std::cout << err.dump(2) << "\n";
    return 1;
  }
}
