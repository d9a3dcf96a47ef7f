// warped: command-line front end for the warped-product analysis library.
//
// Subcommands: analyze, means, mina, distscal, geodesic, sequence.  Sphere
// fields are JSON {"grid":{"n_r","n_theta"},"values":[row-major]}; circle
// fields are {"grid":{"n_phi"},"values":[...]}.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "warped/distscal.hpp"
#include "warped/fieldio.hpp"
#include "warped/geodesics.hpp"
#include "warped/means.hpp"
#include "warped/metrics.hpp"
#include "warped/mina.hpp"
#include "warped/sequences.hpp"
#include "warped/spheregrid.hpp"

using nlohmann::json;
using namespace warped;

namespace {

std::vector<double> parse_csv_doubles(const std::string& s, std::size_t expect,
                                      const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  if (expect != 0 && out.size() != expect)
    throw CLI::ValidationError(what + ": expected " + std::to_string(expect) +
                               " comma-separated values");
  return out;
}

std::vector<int> parse_csv_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

int run_analyze(const std::string& metric, const std::string& field_path,
                double tol, std::string curvature_path, double D, double A) {
  if (curvature_path.empty()) {
    std::string stem = field_path;
    std::size_t dot = stem.rfind('.');
    if (dot != std::string::npos && dot > stem.rfind('/') + 1) stem.resize(dot);
    curvature_path = stem + "_curvature.json";
  }
  json reports = json::array();
  if (metric == "cos") {
    CosMetric m = make_cos_metric(load_field(field_path));
    reports.push_back(report_to_json(tol > 0.0 ? nnsc_check_cos(m, tol) : nnsc_check_cos(m)));
    reports.push_back(report_to_json(grad_log_bound_check(m.f)));
    double vol = volume_cos(m);
    reports.push_back(report_to_json(moser_trudinger_check(m.f, 2.0, vol)));
    save_field(curvature_path, scalar_curvature_cos(m));
  } else if (metric == "soc") {
    SocMetric m = make_soc_metric(load_circle_field(field_path));
    reports.push_back(report_to_json(tol > 0.0 ? nnsc_check_soc(m, tol) : nnsc_check_soc(m)));
    reports.push_back(report_to_json(gradient_bound_soc(m)));
    if (D > 0.0 && A > 0.0) {
      SocWarpBounds wb = soc_min_warp_bounds(m, D, A);
      reports.push_back(report_to_json(wb.min_upper));
      reports.push_back(report_to_json(wb.min_lower));
      reports.push_back(report_to_json(wb.max_upper));
    }
    save_json_file(curvature_path, circle_to_json(scalar_curvature_soc(m)));
  } else {
    throw CLI::ValidationError("--metric must be cos or soc");
  }
  std::cout << reports.dump(2) << "\n";
  return 0;
}

int run_means(const std::string& field_path, const std::string& center,
              const std::string& curve_path, double C) {
  ScalarField f = load_field(field_path);
  std::vector<double> rc = parse_csv_doubles(center, 2, "--center");
  Vec3 x = sph_to_vec(rc[0], rc[1]);
  if (C < 0.0) C = lq_norm(f, 2.0) / std::sqrt(2.0 * pi);
  MeanCurve rings = spherical_mean_curve(f, x);
  std::ofstream out(curve_path);
  if (!out) throw std::runtime_error("cannot open " + curve_path + " for writing");
  out << "radius,phi,ball_avg,shifted_ball_avg\n";
  out.precision(12);
  const PolarGrid& g = f.grid;
  for (int i = 0; i < g.n_r; ++i) {
    double R = g.r_nodes[i];
    double plain = ball_average_shifted(f, x, R, 0.0);
    double shifted = ball_average_shifted(f, x, R, C);
    out << R << "," << rings.values[i] << "," << plain << "," << shifted << "\n";
  }
  json summary = {{"center", {rc[0], rc[1]}},
                  {"shift_constant", C},
                  {"ess_inf", essential_infimum(f)},
                  {"curve", curve_path}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int run_mina(const std::string& field_path, double A) {
  ScalarField f = load_field(field_path);
  auto [ub, rec] = mina_upper_bound(f);
  if (A <= 0.0) A = 0.9 * ub;
  json out = {{"upper_bound", ub},
              {"record",
               {{"center", {rec.center.x, rec.center.y, rec.center.z}},
                {"center_index", rec.center_index},
                {"best_radius", rec.best_radius},
                {"best_area", rec.best_area}}}};
  try {
    HSet hs = build_h_set(f, A);
    VitaliTrace t = vitali_l1_trace(f, A, hs);
    out["h_set_size"] = hs.entries.size();
    out["trace"] = {{"A", A},
                    {"l2_hypothesis_met", hs.l2_hypothesis_met},
                    {"selected", t.selected.size()},
                    {"disjoint_ok", t.disjoint_ok},
                    {"coverage_ok", t.coverage_ok},
                    {"per_ball_ok", t.per_ball_ok},
                    {"final_ok", t.final_ok},
                    {"first_bad_link", t.first_bad_link},
                    {"l1_norm", t.l1_norm},
                    {"final_rhs", t.final_rhs},
                    {"final_slack", t.final_slack}};
  } catch (const std::exception& e) {
    out["h_set_size"] = 0;
    out["trace"] = {{"A", A}, {"error", e.what()}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_distscal(const std::string& metric, const std::string& field_path,
                 const std::string& test_path, bool split) {
  json out;
  if (metric == "cos") {
    CosMetric m = make_cos_metric(load_field(field_path));
    ScalarField ubar = test_path == "const"
                           ? constant_field(m.f.grid, 2.0 * pi)
                           : load_field(test_path);
    LLSplit s = ll_split_cos(m, ubar);
    out = {{"pairing", s.pairing},
           {"total", total_scalar_cos(m)},
           {"classical_total", s.classical},
           {"discrepancy", std::abs(s.classical - s.pairing)}};
    if (split) {
      out["first_int"] = s.first;
      out["second_int"] = s.second;
    }
  } else if (metric == "soc") {
    SocMetric m = make_soc_metric(load_circle_field(field_path));
    CircleField ubar = test_path == "const"
                           ? constant_circle_field(m.h.grid, 4.0 * pi)
                           : load_circle_field(test_path);
    LLSplit s = ll_split_soc(m, ubar);
    out = {{"pairing", s.pairing},
           {"total", total_scalar_soc(m)},
           {"classical_total", s.classical},
           {"discrepancy", std::abs(s.classical - s.pairing)}};
    if (split) {
      out["first_int"] = s.first;
      out["second_int"] = s.second;
    }
  } else {
    throw CLI::ValidationError("--metric must be cos or soc");
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_geodesic(const std::string& field_path, const std::string& seed, double T,
                 double dt, const std::string& out_path) {
  ScalarField f = load_field(field_path);
  std::vector<double> s = parse_csv_doubles(seed, 6, "--seed");
  C1Field c1(f);
  GeodesicState s0{s[0], s[1], s[2], s[3], s[4], s[5]};
  Trajectory traj = geodesic_integrate(c1, s0, T, dt);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
  out << "t,r,theta,phi,energy_drift,killing_drift\n";
  out.precision(12);
  double scale = std::max(traj.energy0, 1e-300);
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const GeodesicState& st = traj.states[n];
    double e = geodesic_energy(c1, st), k = killing_momentum(c1, st);
    out << traj.times[n] << "," << st.r << "," << st.theta << "," << st.phi << ","
        << std::abs(e - traj.energy0) / scale << ","
        << std::abs(k - traj.killing0) / scale << "\n";
  }
  ClosureEvent ev = first_closure(c1, traj);
  json summary = {{"aborted", traj.aborted},
                  {"max_energy_drift", traj.max_energy_drift},
                  {"max_killing_drift", traj.max_killing_drift},
                  {"closure",
                   {{"found", ev.found},
                    {"period", ev.period},
                    {"length", ev.length},
                    {"winding", ev.winding},
                    {"position_gap", ev.position_gap}}},
                  {"class", to_string(classify_geodesic(c1, traj, ev))},
                  {"trajectory", out_path}};
  if (traj.aborted) summary["abort_time"] = traj.abort_time;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int run_sequence(const std::string& family, const std::string& js_s,
                 const std::string& p_s, const std::string& q_s, int n,
                 const std::string& out_path, double c, double eps, int l, int m,
                 double C) {
  FamilySpec spec;
  if (family == "log_spike") spec.kind = FamilyKind::log_spike;
  else if (family == "constant") spec.kind = FamilyKind::constant;
  else if (family == "harmonic") spec.kind = FamilyKind::harmonic;
  else throw CLI::ValidationError("--family must be log_spike, constant, or harmonic");
  spec.c = c; spec.eps = eps; spec.l = l; spec.m = m; spec.C = C;
  std::vector<int> js = parse_csv_ints(js_s);
  std::vector<double> ps = parse_csv_doubles(p_s, 0, "--p");
  std::vector<double> qs = parse_csv_doubles(q_s, 0, "--q");
  PolarGrid g = make_polar_grid(n, n);
  std::vector<ScalarField> tests = {constant_field(g, 2.0 * pi)};
  ConvergenceReport rep = convergence_report(spec, js, g, ps, qs, tests);

  std::string stem = out_path;
  std::size_t dot = stem.rfind(".json");
  if (dot != std::string::npos) stem = stem.substr(0, dot);
  json members = json::array();
  for (std::size_t a = 0; a < js.size(); ++a) {
    GeneratedCos gc = generate(spec, js[a], g);
    std::string path = stem + "_" + gc.name + ".json";
    save_field(path, gc.f);
    members.push_back({{"j", js[a]}, {"name", gc.name}, {"field", path},
                       {"nnsc_verified", gc.nnsc_verified}});
  }
  json out = {{"family", family},
              {"grid", {{"n_r", n}, {"n_theta", n}}},
              {"js", rep.js},
              {"names", rep.names},
              {"q_list", rep.q_list},
              {"p_list", rep.p_list},
              {"lq_to_last", rep.lq_to_last},
              {"lq_to_limit", rep.lq_to_limit},
              {"w1p_norm", rep.w1p_norm},
              {"mt_slack", rep.mt_slack},
              {"gradln_slack", rep.gradln_slack},
              {"weak_residual", rep.weak_residual},
              {"nnsc", rep.nnsc},
              {"lq_to_last_monotone", rep.lq_to_last_monotone},
              {"lq_to_limit_monotone", rep.lq_to_limit_monotone},
              {"members", members}};
  save_json_file(out_path, out);
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"warped-product metric analysis"};
  app.require_subcommand(1);

  std::string metric = "cos", field_path, test_path = "const";
  std::string center, curve_path, seed, out_path;
  std::string family = "log_spike", js_s = "2,4,8,16", p_s = "1.5,2", q_s = "1,2,4";
  std::string curvature_path;  // default: <field stem>_curvature.json
  double tol = -1.0, A = -1.0, D = -1.0, C_shift = -1.0, T = 10.0, dt = 1e-3;
  double c = 1.0, eps = 0.0, C_floor = 1.5;
  int l = 2, m = 0, n = 128;
  bool split = false;

  CLI::App* analyze = app.add_subcommand("analyze", "curvature and inequality reports");
  analyze->add_option("--metric", metric, "cos|soc")->required();
  analyze->add_option("--field", field_path, "warp field file")->required();
  analyze->add_option("--tol", tol, "NNSC tolerance (default: grid-calibrated)");
  analyze->add_option("--curvature", curvature_path, "output curvature field file");
  analyze->add_option("--D", D, "diameter hypothesis for soc warp bounds");
  analyze->add_option("--A", A, "area hypothesis for soc warp bounds");

  CLI::App* means = app.add_subcommand("means", "spherical means and ball averages");
  means->add_option("--field", field_path, "warp field file")->required();
  means->add_option("--center", center, "center as r,theta")->required();
  means->add_option("--curve", curve_path, "output CSV path")->required();
  means->add_option("--C", C_shift, "shift constant (default ||f||_2 / sqrt(2 pi))");

  CLI::App* mina = app.add_subcommand("mina", "sweepout width and Vitali trace");
  mina->add_option("--field", field_path, "warp field file")->required();
  mina->add_option("--A", A, "area hypothesis (default 0.9 * upper_bound)");

  CLI::App* distscal = app.add_subcommand("distscal", "distributional curvature pairing");
  distscal->add_option("--metric", metric, "cos|soc")->required();
  distscal->add_option("--field", field_path, "warp field file")->required();
  distscal->add_option("--test", test_path, "reduced test function file, or 'const'");
  distscal->add_flag("--split", split, "include the divergence/zeroth-order split");

  CLI::App* geod = app.add_subcommand("geodesic", "integrate one geodesic");
  geod->add_option("--field", field_path, "warp field file")->required();
  geod->add_option("--seed", seed, "r,theta,phi,rdot,thetadot,phidot")->required();
  geod->add_option("--T", T, "integration time")->required();
  geod->add_option("--dt", dt, "step size")->required();
  geod->add_option("--out", out_path, "trajectory CSV path")->required();

  CLI::App* seq = app.add_subcommand("sequence", "family convergence report");
  seq->add_option("--family", family, "log_spike|constant|harmonic");
  seq->add_option("--js", js_s, "member indices, comma-separated");
  seq->add_option("--p", p_s, "W^{1,p} exponents");
  seq->add_option("--q", q_s, "L^q exponents");
  seq->add_option("--n", n, "grid size (n_r = n_theta)");
  seq->add_option("--out", out_path, "report JSON path")->required();
  seq->add_option("--c", c, "constant/harmonic base level");
  seq->add_option("--eps", eps, "harmonic amplitude");
  seq->add_option("--l", l, "harmonic degree");
  seq->add_option("--m", m, "harmonic order");
  seq->add_option("--floor", C_floor, "log_spike floor C");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*analyze) return run_analyze(metric, field_path, tol, curvature_path, D, A);
    if (*means) return run_means(field_path, center, curve_path, C_shift);
    if (*mina) return run_mina(field_path, A);
    if (*distscal) return run_distscal(metric, field_path, test_path, split);
    if (*geod) return run_geodesic(field_path, seed, T, dt, out_path);
    if (*seq) return run_sequence(family, js_s, p_s, q_s, n, out_path, c, eps, l, m, C_floor);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
