#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "warped/spheregrid.hpp"

using namespace warped;
using Catch::Approx;

TEST_CASE("polar grid construction") {
  PolarGrid g = make_polar_grid(16, 32);
  REQUIRE(g.n_r == 16);
  REQUIRE(g.n_theta == 32);
  REQUIRE(g.r_nodes.front() == Approx(g.dr / 2.0));
  REQUIRE(g.r_nodes.back() == Approx(pi - g.dr / 2.0));
  REQUIRE(g.sin_edge.front() == 0.0);
  REQUIRE(g.sin_edge.back() == 0.0);
  REQUIRE_THROWS_AS(make_polar_grid(3, 16), std::invalid_argument);
  REQUIRE_THROWS_AS(make_polar_grid(16, 3), std::invalid_argument);
}

TEST_CASE("quadrature measures the sphere") {
  // Midpoint rule in r has the closed-form mass (2 pi^2 / n) / sin(pi / 2n).
  for (int n : {16, 64}) {
    PolarGrid g = make_polar_grid(n, n);
    double mass = integrate(constant_field(g, 1.0));
    double exact = (2.0 * pi * pi / n) / std::sin(pi / (2.0 * n));
    REQUIRE(mass == Approx(exact).epsilon(1e-13));
    REQUIRE(std::abs(mass - 4.0 * pi) <= 4.0 * pi * pi * pi / (20.0 * n * n));
  }
  PolarGrid g = make_polar_grid(64, 64);
  // Odd-in-z integrands cancel by node symmetry.
  ScalarField z = make_field(g, [](double r, double) { return std::cos(r); });
  REQUIRE(integrate(z) == Approx(0.0).margin(1e-12));
  ScalarField f = make_field(g, [](double r, double) { return 0.5 * (1.0 + std::cos(r)); });
  REQUIRE(integrate(f) == Approx(2.0 * pi).epsilon(1e-3));
}

TEST_CASE("laplacian eigenfunctions and conservation") {
  PolarGrid g = make_polar_grid(64, 64);
  // Y_2 = P_2(cos r): lap Y = -6 Y away from the pole rows.
  ScalarField y2 = make_field(g, [](double r, double) {
    double c = std::cos(r);
    return 0.5 * (3.0 * c * c - 1.0);
  });
  ScalarField lap = laplacian(y2);
  // The flux stencil is second order with an O(1/r^2) constant near the
  // poles, so the first rows carry ~8e-3 error at n = 64.
  for (int i = 1; i < g.n_r - 1; ++i)
    for (int k = 0; k < g.n_theta; ++k)
      REQUIRE(lap.at(i, k) == Approx(-6.0 * y2.at(i, k)).margin(2e-2));
  for (int i = 8; i < g.n_r - 8; ++i)
    for (int k = 0; k < g.n_theta; ++k)
      REQUIRE(lap.at(i, k) == Approx(-6.0 * y2.at(i, k)).margin(1e-2));

  // Flux form: the integral of lap f vanishes to roundoff for any field.
  ScalarField f = make_field(g, [](double r, double theta) {
    return std::exp(0.4 * std::sin(r) * std::cos(theta)) + 0.2 * std::cos(r);
  });
  REQUIRE(integrate(laplacian(f)) == Approx(0.0).margin(1e-11));
}

TEST_CASE("laplacian error contracts at second order") {
  // Pointwise the pole rows are only first order for m >= 1 harmonics (the
  // two 1/r-sized terms cancel to leading order and leave an O(h) residual),
  // but their quadrature weight is O(h^2), so the natural grid L2 norm of
  // the residual contracts at the full second-order rate.
  auto err = [](int n) {
    PolarGrid g = make_polar_grid(n, n);
    ScalarField y = make_field(g, [](double r, double theta) {
      return std::assoc_legendre(3, 1, std::cos(r)) * std::cos(theta);
    });
    ScalarField lap = laplacian(y);
    ScalarField res = constant_field(g, 0.0);
    for (int i = 0; i < g.n_r; ++i)
      for (int k = 0; k < g.n_theta; ++k)
        res.at(i, k) = lap.at(i, k) + 12.0 * y.at(i, k);
    return lq_norm(res, 2.0);
  };
  double e64 = err(64), e128 = err(128);
  REQUIRE(e64 / e128 >= 3.5);
}

TEST_CASE("dirichlet energy is adjoint to the laplacian") {
  PolarGrid g = make_polar_grid(48, 48);
  ScalarField f = make_field(g, [](double r, double theta) {
    return 2.0 + std::cos(r) + 0.3 * std::sin(r) * std::sin(theta);
  });
  ScalarField u = make_field(g, [](double r, double theta) {
    return 1.0 + 0.5 * std::cos(2.0 * theta) * std::sin(r) * std::sin(r) +
           0.4 * std::sin(theta) * std::sin(r);
  });
  double lhs = integrate_product(f, laplacian(u));
  double rhs = -dirichlet_energy(f, u);
  REQUIRE(std::abs(lhs) > 0.1);  // non-degenerate pairing
  REQUIRE(lhs == Approx(rhs).epsilon(1e-12).margin(1e-11));
  // Symmetry of the bilinear form.
  REQUIRE(dirichlet_energy(f, u) ==
          Approx(dirichlet_energy(u, f)).epsilon(1e-12).margin(1e-11));
}

TEST_CASE("gradient norm of a zonal field") {
  PolarGrid g = make_polar_grid(128, 128);
  ScalarField f = make_field(g, [](double r, double) { return std::cos(r); });
  ScalarField gn = gradient_norm(f);
  for (int i = 2; i < g.n_r - 2; ++i)
    REQUIRE(gn.at(i, 0) == Approx(std::sin(g.r_nodes[i])).margin(2e-3));
}

TEST_CASE("norms") {
  PolarGrid g = make_polar_grid(128, 128);
  ScalarField one = constant_field(g, 1.0);
  REQUIRE(lq_norm(one, 2.0) == Approx(std::sqrt(4.0 * pi)).epsilon(1e-3));
  REQUIRE(w1p_norm(one, 2.0) == Approx(std::sqrt(4.0 * pi)).epsilon(1e-3));
  ScalarField cz = make_field(g, [](double r, double) { return std::cos(r); });
  // ||cos r||_{W^{1,2}} = sqrt(4pi/3 + 8pi/3).
  REQUIRE(w1p_norm(cz, 2.0) ==
          Approx(std::sqrt(4.0 * pi / 3.0 + 8.0 * pi / 3.0)).epsilon(2e-3));
  REQUIRE_THROWS_AS(lq_norm(one, 0.5), std::invalid_argument);
}

TEST_CASE("bilinear sampling") {
  PolarGrid g = make_polar_grid(32, 32);
  ScalarField f = make_field(g, [](double r, double theta) {
    return std::sin(r) * std::cos(theta) + 2.0;
  });
  for (int i : {0, 7, 31})
    for (int k : {0, 5, 31})
      REQUIRE(sample(f, g.r_nodes[i], g.theta_nodes[k]) == Approx(f.at(i, k)).epsilon(1e-14));
  REQUIRE(sample(f, 1.0, 0.3) == Approx(sample(f, 1.0, 0.3 + 2.0 * pi)).epsilon(1e-14));
  // Constant radial extrapolation beyond the node rows.
  REQUIRE(sample(f, 0.0, 0.3) == Approx(sample(f, g.r_nodes[0], 0.3)).epsilon(1e-14));
}

TEST_CASE("rotation to pole") {
  PolarGrid g = make_polar_grid(64, 64);
  ScalarField f = make_field(g, [](double r, double theta) {
    return 2.0 + std::sin(r) * std::sin(r) * std::cos(2.0 * theta) + 0.5 * std::cos(r);
  });
  Vec3 center = sph_to_vec(1.1, 2.3);
  ScalarField rot = rotate_to_pole(f, center);
  // The north-pole row sits at radius dr/2 from the rotated center, so each
  // node may differ from the center value by |grad f| * dr/2 (~0.05 here);
  // averaging over the ring cancels the first-order term.
  double expect = sample(f, 1.1, 2.3);
  double ring_mean = 0.0;
  for (int k = 0; k < g.n_theta; ++k) {
    REQUIRE(rot.at(0, k) == Approx(expect).margin(8e-2));
    ring_mean += rot.at(0, k) / g.n_theta;
  }
  REQUIRE(ring_mean == Approx(expect).margin(1e-2));
  REQUIRE_THROWS_AS(rotation_to_pole(Vec3{0.0, 0.0, 2.0}), std::invalid_argument);
}

TEST_CASE("geodesic distance") {
  Vec3 n{0.0, 0.0, 1.0}, s{0.0, 0.0, -1.0}, e{1.0, 0.0, 0.0};
  REQUIRE(geodesic_distance(n, s) == Approx(pi));
  REQUIRE(geodesic_distance(n, e) == Approx(pi / 2.0));
  REQUIRE(geodesic_distance(n, n) == Approx(0.0).margin(1e-12));
}

TEST_CASE("circle operators") {
  CircleGrid g = make_circle_grid(128);
  CircleField s = make_circle_field(g, [](double phi) { return std::sin(phi); });
  CircleField d1 = derivative(s), d2 = second_derivative(s);
  for (int k = 0; k < g.n_phi; ++k) {
    // Centered differences: error dphi^2/6 ~ 4e-4 at n_phi = 128.
    REQUIRE(d1.values[k] == Approx(std::cos(g.phi_nodes[k])).margin(5e-4));
    REQUIRE(d2.values[k] == Approx(-std::sin(g.phi_nodes[k])).margin(5e-4));
  }
  CircleField e = edge_derivative(s);
  REQUIRE(e.values[0] == Approx(std::cos(g.dphi / 2.0)).margin(3e-4));
  REQUIRE(integrate_circle(s) == Approx(0.0).margin(1e-12));
  // int |cos| + int |sin| = 4 + 4.
  REQUIRE(bv_norm(s) == Approx(8.0).epsilon(1e-3));
  REQUIRE_THROWS_AS(make_circle_grid(2), std::invalid_argument);
}
