#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "warped/distscal.hpp"
#include "warped/sequences.hpp"

using namespace warped;
using Catch::Approx;

namespace {

double l1_distance(const ScalarField& a, const ScalarField& b) {
  ScalarField d = a;
  for (std::size_t n = 0; n < d.values.size(); ++n) d.values[n] = a.values[n] - b.values[n];
  return lq_norm(d, 1.0);
}

}  // namespace

TEST_CASE("spike members match the profile off the cap") {
  PolarGrid g = make_polar_grid(64, 64);
  const double K = 2.0, C = 1.5;
  ScalarField f = log_spike_field(g, K, C);
  ScalarField lim = log_spike_limit(g, C);
  double rc = 2.0 * std::asin(std::exp(-K) / 2.0);
  for (int i = 0; i < g.n_r; ++i) {
    double r = g.r_nodes[i];
    double p = log_spike_profile(r);
    if (p < K - 1.0) {
      // Tail: the blend is inactive and the member equals the limit exactly.
      REQUIRE(f.at(i, 0) == Approx(lim.at(i, 0)).margin(1e-14));
    }
    if (r < rc / 4.0) {
      // Deep cap: the member sits exactly at the plateau.
      REQUIRE(f.at(i, 0) == Approx(C + K).margin(1e-14));
    }
  }
}

TEST_CASE("spike family is monotone up to its limit") {
  PolarGrid g = make_polar_grid(128, 128);
  FamilySpec spec;
  spec.kind = FamilyKind::log_spike;
  std::vector<int> js = {2, 4, 8, 16};
  std::vector<ScalarField> fs;
  for (int j : js) fs.push_back(generate(spec, j, g).f);
  ScalarField lim = log_spike_limit(g, spec.C);
  for (std::size_t a = 0; a + 1 < fs.size(); ++a)
    for (std::size_t n = 0; n < lim.values.size(); ++n)
      REQUIRE(fs[a + 1].values[n] >= fs[a].values[n] - 1e-12);
  for (const ScalarField& f : fs)
    for (std::size_t n = 0; n < lim.values.size(); ++n)
      REQUIRE(f.values[n] <= lim.values[n] + 1e-12);
  REQUIRE(l1_distance(lim, fs.back()) < 0.02);
}

TEST_CASE("spike family is NNSC at the safe floor and not below") {
  PolarGrid g = make_polar_grid(128, 128);
  FamilySpec spec;
  spec.kind = FamilyKind::log_spike;
  for (int j : {2, 4, 8, 16}) {
    GeneratedCos gc = generate(spec, j, g);
    INFO(gc.name);
    REQUIRE(gc.nnsc_verified);
  }
  // Dropping the floor to 1 pushes the cap plateau outside the NNSC region:
  // the plateau keeps curvature 2 - 1/f, and near the blend the profile's
  // Laplacian (+1/2) no longer compensates the small warp value.
  ScalarField low = log_spike_field(g, std::log(4.0) + 1.0, 1.0);
  InequalityReport rep = nnsc_check_cos(CosMetric{low});
  REQUIRE_FALSE(rep.pass);
  REQUIRE(rep.lhs == Approx(0.193).margin(0.05));
}

TEST_CASE("frozen integrals of the limit profile") {
  PolarGrid g = make_polar_grid(128, 128);
  ScalarField lim = log_spike_limit(g, 1.5);
  ScalarField p = make_field(g, [](double r, double) { return log_spike_profile(r); });
  REQUIRE(integrate(p) == Approx(2.0 * pi * (1.0 - 2.0 * std::log(2.0))).epsilon(1e-2));
  REQUIRE(integrate_product(p, p) == Approx(3.6103).epsilon(1e-2));
  double l2sq = std::pow(lq_norm(lim, 2.0), 2.0);
  REQUIRE(l2sq == Approx(24.603).epsilon(1e-2));
  REQUIRE(integrate(lim) ==
          Approx(4.0 * pi * 1.5 + 2.0 * pi * (1.0 - 2.0 * std::log(2.0))).epsilon(1e-2));
}

TEST_CASE("cap energy grows like the log of the cap radius") {
  PolarGrid g = make_polar_grid(256, 256);
  ScalarField lim = log_spike_limit(g, 1.5);
  const double expected[3] = {11.368, 15.70, 20.04};
  const double eps_list[3] = {0.2, 0.1, 0.05};
  for (int a = 0; a < 3; ++a) {
    double e = cap_dirichlet_energy(lim, eps_list[a]);
    REQUIRE(e == Approx(expected[a]).epsilon(3e-2));
    REQUIRE(e == Approx(2.0 * pi * std::log(1.0 / eps_list[a])).epsilon(0.15));
  }
}

TEST_CASE("sobolev scaling along the spike family") {
  PolarGrid g = make_polar_grid(256, 256);
  FamilySpec spec;
  spec.kind = FamilyKind::log_spike;
  std::vector<double> w2, w15;
  for (int j : {2, 4, 8, 16}) {
    ScalarField f = generate(spec, j, g).f;
    w2.push_back(w1p_norm(f, 2.0));
    w15.push_back(w1p_norm(f, 1.5));
  }
  // The critical-exponent norm keeps growing with the spike level...
  REQUIRE(w2.back() / w2.front() >= 1.10);
  // ...while any subcritical norm saturates: the last three members sit
  // within a few percent of each other.
  double lo = std::min({w15[1], w15[2], w15[3]});
  double hi = std::max({w15[1], w15[2], w15[3]});
  REQUIRE(hi / lo - 1.0 <= 0.05);
}

TEST_CASE("convergence report on the spike family") {
  PolarGrid g = make_polar_grid(128, 128);
  FamilySpec spec;
  spec.kind = FamilyKind::log_spike;
  std::vector<ScalarField> tests;
  tests.push_back(constant_field(g, 2.0 * pi));
  ConvergenceReport rep = convergence_report(spec, {2, 4, 8, 16}, g, {1.5, 2.0},
                                             {1.0, 2.0, 4.0}, tests);
  REQUIRE(rep.names.size() == 4);
  for (bool ok : rep.nnsc) REQUIRE(ok);
  for (bool m : rep.lq_to_limit_monotone) REQUIRE(m);
  for (std::size_t qi = 0; qi < rep.q_list.size(); ++qi) {
    REQUIRE(rep.lq_to_last[qi].back() == 0.0);
    for (std::size_t a = 0; a + 1 < rep.lq_to_limit[qi].size(); ++a)
      REQUIRE(rep.lq_to_limit[qi][a + 1] < rep.lq_to_limit[qi][a]);
  }
  for (double s : rep.mt_slack) REQUIRE(s >= 0.0);
  for (double s : rep.gradln_slack) REQUIRE(s >= 0.0);
  // Weak residuals against the last member shrink as the family converges.
  for (const auto& res : rep.weak_residual) {
    REQUIRE(res.back() == 0.0);
    REQUIRE(res[2] < res[0]);
  }
}

TEST_CASE("convergence report on a constant family is degenerate") {
  PolarGrid g = make_polar_grid(64, 64);
  FamilySpec spec;  // constant, c = 1
  ConvergenceReport rep =
      convergence_report(spec, {1, 2, 3}, g, {2.0}, {2.0}, {});
  for (const auto& row : rep.lq_to_last)
    for (double v : row) REQUIRE(v == 0.0);
  for (const auto& row : rep.lq_to_limit)
    for (double v : row) REQUIRE(v == 0.0);
  // All-zero distances are not strictly decreasing.
  for (bool m : rep.lq_to_last_monotone) REQUIRE_FALSE(m);
  for (bool ok : rep.nnsc) REQUIRE(ok);
}

TEST_CASE("battery members satisfy the closed NNSC consequences") {
  PolarGrid g = make_polar_grid(128, 128);
  for (const GeneratedCos& gc : nnsc_battery(g)) {
    INFO(gc.name);
    REQUIRE(gc.nnsc_verified);
    REQUIRE(grad_log_bound_check(gc.f).pass);
    double vol = volume_cos(CosMetric{gc.f});
    REQUIRE(moser_trudinger_check(gc.f, 2.0, vol).pass);
  }
}

TEST_CASE("moser trudinger frozen value on the round product") {
  PolarGrid g = make_polar_grid(64, 64);
  ScalarField f = constant_field(g, 1.0);
  double vol = volume_cos(CosMetric{f});
  InequalityReport rep = moser_trudinger_check(f, 2.0, vol);
  REQUIRE(rep.hypothesis_ok);
  REQUIRE(rep.pass);
  REQUIRE(rep.rhs == Approx(4.0 * pi * std::exp(3.0)).epsilon(2e-3));
}

TEST_CASE("cutoff probe separates live and degenerate limits") {
  PolarGrid g = make_polar_grid(128, 128);
  CutoffReport live = cutoff_dichotomy_probe(constant_field(g, 1.0), 3.0);
  REQUIRE(live.bounded_away);
  REQUIRE(live.margin == Approx(1.0).margin(1e-12));
  CutoffReport spike = cutoff_dichotomy_probe(log_spike_limit(g, 1.5), 5.0);
  REQUIRE(spike.bounded_away);
  REQUIRE(spike.margin == Approx(1.5 - std::log(2.0)).margin(5e-3));
  CutoffReport dead = cutoff_dichotomy_probe(constant_field(g, 0.005), 3.0);
  REQUIRE_FALSE(dead.bounded_away);
}

TEST_CASE("generator rejects bad specifications") {
  PolarGrid g = make_polar_grid(32, 32);
  CircleGrid cg = make_circle_grid(64);
  FamilySpec spec;
  REQUIRE_THROWS_AS(generate(spec, 0, g), std::invalid_argument);
  spec.kind = FamilyKind::soc_constant;
  REQUIRE_THROWS_AS(generate(spec, 1, g), std::invalid_argument);
  spec.kind = FamilyKind::harmonic;
  spec.c = 1.0;
  spec.eps = 5.0;
  REQUIRE_THROWS_AS(generate(spec, 1, g), std::invalid_argument);
  spec.kind = FamilyKind::log_spike;
  spec.C = 0.5;
  REQUIRE_THROWS_AS(generate(spec, 1, g), std::invalid_argument);
  spec.kind = FamilyKind::constant;
  REQUIRE_THROWS_AS(generate_soc(spec, 1, cg), std::invalid_argument);
  spec.kind = FamilyKind::soc_harmonic;
  spec.c = 0.5;
  spec.eps = 1.0;
  REQUIRE_THROWS_AS(generate_soc(spec, 1, cg), std::invalid_argument);
}

TEST_CASE("circle battery is NNSC with bounded slope") {
  CircleGrid g = make_circle_grid(512);
  for (const GeneratedSoc& gs : soc_battery(g)) {
    INFO(gs.name);
    REQUIRE(gs.nnsc_verified);
    InequalityReport grad = gradient_bound_soc(SocMetric{gs.h});
    REQUIRE(grad.pass);
    REQUIRE(grad.rhs == Approx(1.0).margin(1e-12));
  }
}
