#ifndef WARPED_MINA_HPP
#define WARPED_MINA_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "warped/means.hpp"
#include "warped/metrics.hpp"
#include "warped/spheregrid.hpp"

// Sweepouts of S^2 x_f S^1 by tori over geodesic circles, the width upper
// bound they give for the least minimal-surface area, and the L^1 trace
// (H-set + Vitali covering) that turns the width hypothesis into a mass
// lower bound for the warp.

namespace warped {

struct SweepoutRecord {
  Vec3 center;
  long center_index = -1;
  double best_radius = 0.0;
  double best_area = 0.0;
};

// Area of the torus over the circle of radius rho about x:
// 2 pi * int_{circle} f ds = 2 pi * (2 pi sin rho) * ring mean.
inline double torus_area(const ScalarField& f, Vec3 x, double rho) {
  return 4.0 * pi * pi * std::sin(rho) * spherical_mean(f, x, rho);
}

namespace detail {

// Ring geometry for a center at colatitude a: the sample point at bearing
// psi and ring radius rho has colatitude r(psi) and longitude offset
// alpha(psi) from the center, independent of the center's own longitude.
// Precomputing (r, alpha) per row strips all trigonometry from the inner
// loop of the full-grid center scans.
struct RingGeometry {
  std::vector<double> r, alpha;  // one entry per bearing
};

inline void ring_geometry(double center_colat, double rho, int n_bearings,
                          const std::vector<double>& cos_psi,
                          const std::vector<double>& sin_psi, RingGeometry& out) {
  double sa = std::sin(center_colat), ca = std::cos(center_colat);
  double sr = std::sin(rho), cr = std::cos(rho);
  out.r.resize(n_bearings);
  out.alpha.resize(n_bearings);
  for (int k = 0; k < n_bearings; ++k) {
    double px = ca * sr * cos_psi[k] + sa * cr;
    double py = sr * sin_psi[k];
    double pz = -sa * sr * cos_psi[k] + ca * cr;
    out.r[k] = std::acos(std::min(1.0, std::max(-1.0, pz)));
    out.alpha[k] = std::atan2(py, px);
  }
}

inline double ring_mean_from_geometry(const ScalarField& f, const RingGeometry& geo,
                                      double center_theta) {
  double acc = 0.0;
  for (std::size_t k = 0; k < geo.r.size(); ++k)
    acc += sample(f, geo.r[k], center_theta + geo.alpha[k]);
  return acc / double(geo.r.size());
}

struct CenterScan {
  int best_row = 0;        // radial node index of the best torus area
  double best_area = 0.0;  // refined maximum
  double best_radius = 0.0;
};

// Max over rho of the torus area around one center: node scan over the
// precomputed ring geometries plus 20 rounds of golden-section refinement
// between the neighbours of the best node.
inline CenterScan scan_center(const ScalarField& f, double center_colat,
                              double center_theta,
                              const std::vector<RingGeometry>& rings,
                              const std::vector<double>& cos_psi,
                              const std::vector<double>& sin_psi) {
  const PolarGrid& g = f.grid;
  CenterScan s;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.n_r; ++i) {
    double area =
        4.0 * pi * pi * g.sin_r[i] * ring_mean_from_geometry(f, rings[i], center_theta);
    if (area > best) {
      best = area;
      s.best_row = i;
    }
  }
  RingGeometry geo;
  auto area_at = [&](double rho) {
    ring_geometry(center_colat, rho, g.n_theta, cos_psi, sin_psi, geo);
    return 4.0 * pi * pi * std::sin(rho) * ring_mean_from_geometry(f, geo, center_theta);
  };
  double lo = g.r_nodes[std::max(s.best_row - 1, 0)];
  double hi = g.r_nodes[std::min(s.best_row + 1, g.n_r - 1)];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double a1 = area_at(x1), a2 = area_at(x2);
  for (int it = 0; it < 20; ++it) {
    if (a1 < a2) {
      lo = x1; x1 = x2; a1 = a2;
      x2 = lo + gr * (hi - lo); a2 = area_at(x2);
    } else {
      hi = x2; x2 = x1; a2 = a1;
      x1 = hi - gr * (hi - lo); a1 = area_at(x1);
    }
  }
  if (a1 >= a2) {
    s.best_area = a1; s.best_radius = x1;
  } else {
    s.best_area = a2; s.best_radius = x2;
  }
  double node_area = best, node_rho = g.r_nodes[s.best_row];
  if (node_area >= s.best_area) {
    s.best_area = node_area;
    s.best_radius = node_rho;
  }
  return s;
}

}  // namespace detail

// Upper bound for the least area: min over grid centers of the max over rho
// of the torus area.  Ties between centers keep the lowest node index.
inline std::pair<double, SweepoutRecord> mina_upper_bound(const ScalarField& f) {
  const PolarGrid& g = f.grid;
  std::vector<double> cos_psi(g.n_theta), sin_psi(g.n_theta);
  for (int k = 0; k < g.n_theta; ++k) {
    cos_psi[k] = std::cos(g.theta_nodes[k]);
    sin_psi[k] = std::sin(g.theta_nodes[k]);
  }
  SweepoutRecord rec;
  double best = std::numeric_limits<double>::infinity();
  std::vector<detail::RingGeometry> rings(g.n_r);
  for (int i = 0; i < g.n_r; ++i) {
    for (int j = 0; j < g.n_r; ++j)
      detail::ring_geometry(g.r_nodes[i], g.r_nodes[j], g.n_theta, cos_psi, sin_psi,
                            rings[j]);
    for (int k = 0; k < g.n_theta; ++k) {
      detail::CenterScan s = detail::scan_center(f, g.r_nodes[i], g.theta_nodes[k],
                                                 rings, cos_psi, sin_psi);
      if (s.best_area < best) {
        best = s.best_area;
        rec.center = sph_to_vec(g.r_nodes[i], g.theta_nodes[k]);
        rec.center_index = long(g.index(i, k));
        rec.best_radius = s.best_radius;
        rec.best_area = s.best_area;
      }
    }
  }
  return {best, rec};
}

struct HSetEntry {
  Vec3 x;
  long node_index = -1;
  double r_x = 0.0;             // kept maximizing radius, <= pi/2 (+half step)
  double circle_integral = 0.0; // int_{boundary circle} f ds at r_x
  double min_ring_mean = 0.0;   // min over node radii <= r_x of the ring mean
};

struct HSet {
  std::vector<HSetEntry> entries;
  double A = 0.0;
  bool l2_hypothesis_met = false;   // ||f||_2 < A / (2^{3/2} pi^{5/2})
  double antipode_pairing_distance = 0.0;
  bool pair_coverage_ok = false;    // every antipodal pair contributes a member
  bool circle_integral_ok = false;  // every entry >= A / 2pi - tol
  bool floor_ok = false;            // ring means >= A / 8pi^2 - tol up to r_x
  double worst_circle_slack = 0.0;
  double worst_floor_slack = 0.0;
  double coverage_area = 0.0;       // measure of union of B_{r_x/10}
  bool coverage_ok = false;         // >= 2 pi - tol
};

// Centers whose maximizing radius lands in the closed lower hemisphere of
// radii, with their boundary-circle data.  Aborts only on broken
// preconditions (positivity, NNSC, A <= 0); the conclusions of the
// construction are verified numerically and reported as flags.  The L^2
// smallness threshold is recorded, not enforced: it is jointly infeasible
// with any A the sweepout admits (see tests), and the numeric trace stands
// on the verified flags instead.
inline HSet build_h_set(const ScalarField& f, double A, double tol = 1e-9) {
  const PolarGrid& g = f.grid;
  if (!(A > 0.0)) throw std::invalid_argument("build_h_set: need A > 0");
  InequalityReport nnsc = nnsc_check_cos(CosMetric{f});
  if (!nnsc.pass)
    throw std::runtime_error("build_h_set: hypothesis failure, field is not NNSC");
  HSet hs;
  hs.A = A;
  hs.l2_hypothesis_met =
      lq_norm(f, 2.0) < A / (std::pow(2.0, 1.5) * std::pow(pi, 2.5));

  std::vector<double> cos_psi(g.n_theta), sin_psi(g.n_theta);
  for (int k = 0; k < g.n_theta; ++k) {
    cos_psi[k] = std::cos(g.theta_nodes[k]);
    sin_psi[k] = std::sin(g.theta_nodes[k]);
  }
  const double keep_limit = pi / 2.0 + g.dr / 2.0 + 1e-12;
  std::vector<char> kept(g.size(), 0);
  std::vector<detail::RingGeometry> rings(g.n_r);
  std::vector<double> means(g.n_r);
  for (int i = 0; i < g.n_r; ++i) {
    for (int j = 0; j < g.n_r; ++j)
      detail::ring_geometry(g.r_nodes[i], g.r_nodes[j], g.n_theta, cos_psi, sin_psi,
                            rings[j]);
    for (int k = 0; k < g.n_theta; ++k) {
      // Node-radius argmax of the circle integral 2 pi sin(r) * ring mean.
      int best_row = 0;
      double best_integral = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < g.n_r; ++j) {
        means[j] = detail::ring_mean_from_geometry(f, rings[j], g.theta_nodes[k]);
        double integral = 2.0 * pi * g.sin_r[j] * means[j];
        if (integral > best_integral) {
          best_integral = integral;
          best_row = j;
        }
      }
      if (g.r_nodes[best_row] > keep_limit) continue;
      HSetEntry e;
      e.x = sph_to_vec(g.r_nodes[i], g.theta_nodes[k]);
      e.node_index = long(g.index(i, k));
      e.r_x = g.r_nodes[best_row];
      e.circle_integral = best_integral;
      e.min_ring_mean = means[0];
      for (int j = 0; j <= best_row; ++j)
        e.min_ring_mean = std::min(e.min_ring_mean, means[j]);
      kept[g.index(i, k)] = 1;
      hs.entries.push_back(e);
    }
  }

  // Antipodal pairing: exact grid antipodes when n_theta is even, nearest
  // node otherwise.  At least one member of each pair must have been kept.
  hs.pair_coverage_ok = true;
  if (g.n_theta % 2 == 0) {
    hs.antipode_pairing_distance = 0.0;
    for (int i = 0; i < g.n_r; ++i)
      for (int k = 0; k < g.n_theta; ++k) {
        int ia = g.n_r - 1 - i, ka = (k + g.n_theta / 2) % g.n_theta;
        if (!kept[g.index(i, k)] && !kept[g.index(ia, ka)]) hs.pair_coverage_ok = false;
      }
  } else {
    hs.antipode_pairing_distance = std::hypot(g.dr / 2.0, g.dtheta / 2.0);
  }

  hs.worst_circle_slack = std::numeric_limits<double>::infinity();
  hs.worst_floor_slack = std::numeric_limits<double>::infinity();
  const double circle_floor = A / (2.0 * pi);
  const double mean_floor = A / (8.0 * pi * pi);
  for (const HSetEntry& e : hs.entries) {
    hs.worst_circle_slack = std::min(hs.worst_circle_slack, e.circle_integral - circle_floor);
    hs.worst_floor_slack = std::min(hs.worst_floor_slack, e.min_ring_mean - mean_floor);
  }
  hs.circle_integral_ok = hs.worst_circle_slack >= -tol;
  hs.floor_ok = hs.worst_floor_slack >= -tol;

  // Coverage of the tenth-radius balls.
  std::vector<Vec3> nodes(g.size());
  for (int i = 0; i < g.n_r; ++i)
    for (int k = 0; k < g.n_theta; ++k)
      nodes[g.index(i, k)] = sph_to_vec(g.r_nodes[i], g.theta_nodes[k]);
  std::vector<char> covered(g.size(), 0);
  for (const HSetEntry& e : hs.entries) {
    double c = std::cos(e.r_x / 10.0);
    for (std::size_t n = 0; n < nodes.size(); ++n)
      if (!covered[n] && dot(nodes[n], e.x) >= c) covered[n] = 1;
  }
  double area = 0.0;
  for (int i = 0; i < g.n_r; ++i)
    for (int k = 0; k < g.n_theta; ++k)
      if (covered[g.index(i, k)]) area += g.weight(i);
  hs.coverage_area = area;
  hs.coverage_ok = area >= 2.0 * pi - std::max(tol, 4.0 * pi / g.n_r);
  return hs;
}

struct VitaliTrace {
  std::vector<long> selected;  // indices into the H-set entry list
  bool disjoint_ok = false;                 // link a
  double uncovered_measure = 0.0;
  bool coverage_ok = false;                 // link b
  double worst_ball_integral_slack = 0.0;
  double worst_area_ratio_slack = 0.0;
  bool per_ball_ok = false;                 // link c
  double sum_ball_integrals = 0.0;
  double sum_half_areas = 0.0;
  double l1_norm = 0.0;
  double final_rhs = 0.0;                   // A / (100 pi)
  double final_slack = 0.0;
  bool final_ok = false;                    // link d
  int first_bad_link = 0;                   // 0 = chain intact, else 1..4
};

// Greedy Vitali selection over the H-set (descending radius, disjoint
// tenth-radius balls) and the audited chain from the H-set floor to
// ||f||_1 >= A / (100 pi).
inline VitaliTrace vitali_l1_trace(const ScalarField& f, double A, const HSet& hs,
                                   double tol = 1e-9) {
  const PolarGrid& g = f.grid;
  VitaliTrace t;
  t.final_rhs = A / (100.0 * pi);

  std::vector<long> order(hs.entries.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = long(j);
  std::stable_sort(order.begin(), order.end(), [&](long a, long b) {
    if (hs.entries[a].r_x != hs.entries[b].r_x) return hs.entries[a].r_x > hs.entries[b].r_x;
    return hs.entries[a].node_index < hs.entries[b].node_index;
  });
  for (long j : order) {
    const HSetEntry& e = hs.entries[j];
    bool ok = true;
    for (long s : t.selected) {
      const HSetEntry& es = hs.entries[s];
      if (geodesic_distance(e.x, es.x) <= (e.r_x + es.r_x) / 10.0) {
        ok = false;
        break;
      }
    }
    if (ok) t.selected.push_back(j);
  }

  // link a: disjointness of the selected tenth-radius balls
  t.disjoint_ok = true;
  for (std::size_t a = 0; a < t.selected.size(); ++a)
    for (std::size_t b = a + 1; b < t.selected.size(); ++b) {
      const HSetEntry& ea = hs.entries[t.selected[a]];
      const HSetEntry& eb = hs.entries[t.selected[b]];
      if (geodesic_distance(ea.x, eb.x) <= (ea.r_x + eb.r_x) / 10.0) t.disjoint_ok = false;
    }

  // link b: half-radius balls of the selected entries cover every
  // tenth-radius ball of the H-set (within quadrature tolerance)
  std::vector<Vec3> nodes(g.size());
  for (int i = 0; i < g.n_r; ++i)
    for (int k = 0; k < g.n_theta; ++k)
      nodes[g.index(i, k)] = sph_to_vec(g.r_nodes[i], g.theta_nodes[k]);
  std::vector<char> in_union(g.size(), 0), in_cover(g.size(), 0);
  for (const HSetEntry& e : hs.entries) {
    double c = std::cos(e.r_x / 10.0);
    for (std::size_t n = 0; n < nodes.size(); ++n)
      if (!in_union[n] && dot(nodes[n], e.x) >= c) in_union[n] = 1;
  }
  for (long s : t.selected) {
    const HSetEntry& e = hs.entries[s];
    double c = std::cos(e.r_x / 2.0);
    for (std::size_t n = 0; n < nodes.size(); ++n)
      if (!in_cover[n] && dot(nodes[n], e.x) >= c) in_cover[n] = 1;
  }
  double uncovered = 0.0;
  for (int i = 0; i < g.n_r; ++i)
    for (int k = 0; k < g.n_theta; ++k) {
      std::size_t n = g.index(i, k);
      if (in_union[n] && !in_cover[n]) uncovered += g.weight(i);
    }
  t.uncovered_measure = uncovered;
  t.coverage_ok = uncovered <= std::max(tol, 8.0 * pi / g.n_r);

  // link c: per selected ball, (A/8pi^2) Area(B_{r/10}) <= int_{B_{r/10}} f
  // and Area(B_{r/10}) >= Area(B_{r/2}) / 25 (closed-form areas)
  const double mean_floor = A / (8.0 * pi * pi);
  t.worst_ball_integral_slack = std::numeric_limits<double>::infinity();
  t.worst_area_ratio_slack = std::numeric_limits<double>::infinity();
  for (long s : t.selected) {
    const HSetEntry& e = hs.entries[s];
    MeanCurve rings = spherical_mean_curve(f, e.x);
    double r10 = e.r_x / 10.0, r2 = e.r_x / 2.0;
    double ball_f = ball_integral_from_rings(g, rings.values, r10);
    double area10 = 2.0 * pi * (1.0 - std::cos(r10));
    double area2 = 2.0 * pi * (1.0 - std::cos(r2));
    t.worst_ball_integral_slack =
        std::min(t.worst_ball_integral_slack, ball_f - mean_floor * area10);
    t.worst_area_ratio_slack =
        std::min(t.worst_area_ratio_slack, area10 - area2 / 25.0);
    t.sum_ball_integrals += ball_f;
    t.sum_half_areas += area2;
  }
  t.per_ball_ok = t.worst_ball_integral_slack >= -tol && t.worst_area_ratio_slack >= -tol;

  // link d: disjointness gives ||f||_1 >= sum of ball integrals, the floor
  // and area comparison push that to (A/8pi^2)(1/25) * (coverage >= 2 pi)
  t.l1_norm = lq_norm(f, 1.0);
  t.final_slack = t.l1_norm - t.final_rhs;
  t.final_ok = t.final_slack >= -tol && t.l1_norm >= t.sum_ball_integrals - tol;

  if (!t.disjoint_ok) t.first_bad_link = 1;
  else if (!t.coverage_ok) t.first_bad_link = 2;
  else if (!t.per_ball_ok) t.first_bad_link = 3;
  else if (!t.final_ok) t.first_bad_link = 4;
  return t;
}

inline VitaliTrace vitali_l1_trace(const ScalarField& f, double A, double tol = 1e-9) {
  return vitali_l1_trace(f, A, build_h_set(f, A), tol);
}

// Floor estimate for a member f of a converging family against the limit
// field: with e the essential infimum of the limit,
//   f(x) >= e - ||f_lim - f||_1 / (2 pi (1 - cos r1)) - C * mean_d(r1)
// for every x, where r1 is any radius with C * mean_d(r1) < e/2 and the
// L^1 term <= e/4; the conclusion min f >= e/4 is what is reported.
inline InequalityReport fj_floor_estimate(const ScalarField& f,
                                          const ScalarField& f_limit, double C,
                                          double delta = 1e-3, double tol = 1e-9) {
  require_same_grid(f, f_limit, "fj_floor_estimate");
  const PolarGrid& g = f.grid;
  double e = essential_infimum(f_limit, delta);
  ScalarField diff = f;
  for (std::size_t n = 0; n < diff.values.size(); ++n)
    diff.values[n] = f_limit.values[n] - f.values[n];
  double l1_gap = lq_norm(diff, 1.0);
  double c_needed = lq_norm(f, 2.0) / std::sqrt(2.0 * pi);

  InequalityReport r;
  r.name = "fj_floor";
  r.tol = tol;
  r.hypothesis_ok = C >= c_needed - 1e-12;
  double r1 = -1.0, term2 = 0.0, term3 = 0.0;
  for (int i = 0; i < g.n_r && g.r_nodes[i] <= pi / 2.0; ++i) {
    double rho = g.r_nodes[i];
    double t3 = C * mean_distance_in_ball(rho);
    if (!(t3 < e / 2.0)) continue;
    double t2 = l1_gap / (2.0 * pi * (1.0 - std::cos(rho)));
    if (t2 <= e / 4.0) {
      r1 = rho;
      term2 = t2;
      term3 = t3;
      break;
    }
  }
  double fmin = *std::min_element(f.values.begin(), f.values.end());
  r.lhs = e / 4.0;
  r.rhs = fmin;
  if (r1 < 0.0) {
    r.hypothesis_ok = false;
    r.note = "no admissible r1 (member too far from the limit); ess_inf=" +
             std::to_string(e);
    return finish_report(r);
  }
  r.note = "ess_inf=" + std::to_string(e) + " r1=" + std::to_string(r1) +
           " l1_term=" + std::to_string(term2) + " shift_term=" + std::to_string(term3);
  return finish_report(r);
}

}  // namespace warped

#endif  // WARPED_MINA_HPP
