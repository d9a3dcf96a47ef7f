#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "warped/metrics.hpp"
#include "warped/sequences.hpp"

using namespace warped;
using Catch::Approx;

TEST_CASE("product metric has scalar curvature 2") {
  PolarGrid g = make_polar_grid(64, 64);
  ScalarField scal = scalar_curvature_cos(make_cos_metric(constant_field(g, 1.0)));
  for (double v : scal.values) REQUIRE(v == Approx(2.0).margin(1e-13));
}

TEST_CASE("zonal warp curvature matches the eigenfunction formula") {
  PolarGrid g = make_polar_grid(128, 128);
  ScalarField f = make_field(g, [](double r, double) { return 2.0 + std::cos(r); });
  ScalarField scal = scalar_curvature_cos(make_cos_metric(f));
  // Scal = 2 - 2 (-2 cos r) / (2 + cos r).
  for (int i = 1; i < g.n_r - 1; ++i) {
    double c = std::cos(g.r_nodes[i]);
    REQUIRE(scal.at(i, 17) == Approx(2.0 + 4.0 * c / (2.0 + c)).margin(2e-3));
  }
}

TEST_CASE("green profile has laplacian plus one half") {
  // The capped-spike tail is C - ln(2 sin(r/2)); its Laplacian is +1/2 off
  // the pole (not -1/2), which decides where NNSC actually holds.
  PolarGrid g = make_polar_grid(256, 256);
  ScalarField f = log_spike_limit(g, 1.5);
  ScalarField lap = laplacian(f);
  for (int i = 0; i < g.n_r; ++i) {
    if (g.r_nodes[i] < 0.5 || g.r_nodes[i] > 2.6) continue;
    REQUIRE(lap.at(i, 3) == Approx(0.5).margin(1e-3));
  }
}

TEST_CASE("spike members read 2 - 1/f away from cap and corner") {
  PolarGrid g = make_polar_grid(256, 256);
  ScalarField f = log_spike_field(g, 2.0, 1.5);
  ScalarField scal = scalar_curvature_cos(make_cos_metric(f));
  for (int i = 0; i < g.n_r; ++i) {
    double r = g.r_nodes[i];
    if (r < 0.8 || r > 2.6) continue;  // clear of the corner band and far pole
    REQUIRE(scal.at(i, 11) == Approx(2.0 - 1.0 / f.at(i, 11)).margin(2e-3));
  }
}

TEST_CASE("nnsc check accepts and rejects correctly") {
  PolarGrid g = make_polar_grid(128, 128);
  REQUIRE(nnsc_check_cos(make_cos_metric(constant_field(g, 1.0))).pass);
  REQUIRE(nnsc_check_cos(make_cos_metric(constant_field(g, 7.0))).pass);

  // f = 5 + 4.9 Y_2 dips into positive lap f - f near Y_2 = -1/2.
  ScalarField bad = make_field(g, [](double r, double) {
    double c = std::cos(r);
    return 5.0 + 4.9 * 0.5 * (3.0 * c * c - 1.0);
  });
  InequalityReport rep = nnsc_check_cos(make_cos_metric(bad));
  REQUIRE_FALSE(rep.pass);
  REQUIRE(rep.lhs == Approx(12.15).margin(0.1));
}

TEST_CASE("volume of the warped product") {
  PolarGrid g = make_polar_grid(64, 64);
  REQUIRE(volume_cos(make_cos_metric(constant_field(g, 1.0))) ==
          Approx(8.0 * pi * pi).epsilon(1e-3));
  REQUIRE(volume_cos(make_cos_metric(constant_field(g, 2.0))) ==
          Approx(16.0 * pi * pi).epsilon(1e-3));
}

TEST_CASE("positivity is enforced") {
  PolarGrid g = make_polar_grid(16, 16);
  ScalarField f = constant_field(g, 1.0);
  f.values[40] = -0.5;
  REQUIRE_THROWS_AS(make_cos_metric(f), std::invalid_argument);
  CircleGrid cg = make_circle_grid(16);
  CircleField h = constant_circle_field(cg, 1.0);
  h.values[3] = 0.0;
  REQUIRE_THROWS_AS(make_soc_metric(h), std::invalid_argument);
}

TEST_CASE("soc constant curvature") {
  CircleGrid g = make_circle_grid(64);
  for (double c : {1.0, 2.0, 0.5}) {
    CircleField scal = scalar_curvature_soc(make_soc_metric(constant_circle_field(g, c)));
    for (double v : scal.values) REQUIRE(v == Approx(2.0 / (c * c)).margin(1e-13));
  }
}

TEST_CASE("soc wave curvature matches the closed form") {
  CircleGrid g = make_circle_grid(256);
  CircleField h = make_circle_field(g, [](double phi) { return 2.0 + 0.1 * std::sin(phi); });
  CircleField scal = scalar_curvature_soc(make_soc_metric(h));
  for (int k = 0; k < g.n_phi; ++k) {
    double phi = g.phi_nodes[k];
    double hv = 2.0 + 0.1 * std::sin(phi);
    double hp = 0.1 * std::cos(phi), hpp = -0.1 * std::sin(phi);
    double expect = -4.0 * hpp / hv + 2.0 * (1.0 - hp * hp) / (hv * hv);
    REQUIRE(scal.values[k] == Approx(expect).margin(1e-3));
  }
}

TEST_CASE("soc nnsc accepts the small wave and rejects the large one") {
  CircleGrid g = make_circle_grid(128);
  CircleField ok = make_circle_field(g, [](double phi) { return 2.0 + 0.1 * std::sin(phi); });
  REQUIRE(nnsc_check_soc(make_soc_metric(ok)).pass);

  CircleField bad = make_circle_field(g, [](double phi) { return 2.0 + 0.5 * std::sin(phi); });
  InequalityReport rep = nnsc_check_soc(make_soc_metric(bad));
  REQUIRE_FALSE(rep.pass);
  // Scal at phi = 3pi/2: -4 (0.5) / 1.5 + 2 / 1.5^2 = -4/9.
  REQUIRE(rep.lhs == Approx(4.0 / 9.0).margin(2e-3));
}

TEST_CASE("nnsc soc warps keep |h'| at most 1") {
  CircleGrid g = make_circle_grid(128);
  CircleField h = make_circle_field(g, [](double phi) { return 2.0 + 0.1 * std::sin(phi); });
  InequalityReport rep = gradient_bound_soc(make_soc_metric(h));
  REQUIRE(rep.pass);
  REQUIRE(rep.hypothesis_ok);
  REQUIRE(rep.lhs == Approx(0.1).margin(1e-3));
}

TEST_CASE("slice mean curvature") {
  CircleGrid g = make_circle_grid(256);
  CircleField h = make_circle_field(g, [](double phi) { return 2.0 + 0.1 * std::sin(phi); });
  SocMetric m = make_soc_metric(h);
  // 2 |h'| / h at phi = 0: 2 * 0.1 / 2.
  REQUIRE(slice_mean_curvature_soc(m, 0.0) == Approx(0.1).margin(1e-3));
  REQUIRE(slice_mean_curvature_soc(m, pi / 2.0) == Approx(0.0).margin(1e-3));
}

TEST_CASE("soc warp bounds for the round product") {
  CircleGrid g = make_circle_grid(64);
  double c = 2.0;
  SocMetric m = make_soc_metric(constant_circle_field(g, c));
  // Diameter pi c, slice area 4 pi c^2 make every bound tight or slack.
  SocWarpBounds b = soc_min_warp_bounds(m, pi * c, 4.0 * pi * c * c);
  REQUIRE(b.min_upper.pass);
  REQUIRE(b.min_lower.pass);
  REQUIRE(b.max_upper.pass);
  REQUIRE(b.min_upper.lhs == Approx(c));
  REQUIRE(b.min_lower.rhs == Approx(c));
}
