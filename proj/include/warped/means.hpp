#ifndef WARPED_MEANS_HPP
#define WARPED_MEANS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "warped/metrics.hpp"
#include "warped/spheregrid.hpp"

// Spherical means over geodesic circles, shifted ball averages, truncations,
// and the weak-form / measure-theoretic helpers built on them.

namespace warped {

struct MeanCurve {
  Vec3 center;
  std::vector<double> radii;
  std::vector<double> values;
};

// Mean of f over the geodesic circle of radius rho about x: the circle is
// sampled at n_theta equispaced bearings through bilinear interpolation,
// which reproduces the corresponding row of rotate_to_pole(f, x).
inline double spherical_mean(const ScalarField& f, Vec3 x, double rho) {
  const PolarGrid& g = f.grid;
  Mat3 R = rotation_to_pole(x);
  double acc = 0.0;
  for (int k = 0; k < g.n_theta; ++k) {
    Vec3 p = apply(R, sph_to_vec(rho, g.theta_nodes[k]));
    acc += sample(f, p);
  }
  return acc / g.n_theta;
}

// Ring means at every radial node (one pass, shared rotation).
inline MeanCurve spherical_mean_curve(const ScalarField& f, Vec3 x) {
  const PolarGrid& g = f.grid;
  Mat3 R = rotation_to_pole(x);
  MeanCurve c;
  c.center = x;
  c.radii = g.r_nodes;
  c.values.resize(g.n_r);
  for (int i = 0; i < g.n_r; ++i) {
    double acc = 0.0;
    double sr = g.sin_r[i];
    double cr = std::cos(g.r_nodes[i]);
    for (int k = 0; k < g.n_theta; ++k) {
      Vec3 d = {sr * std::cos(g.theta_nodes[k]), sr * std::sin(g.theta_nodes[k]), cr};
      acc += sample(f, apply(R, d));
    }
    c.values[i] = acc / g.n_theta;
  }
  return c;
}

// int_{B_R(x)} f from ring means at the radial nodes: row value times the
// exact annulus measure 2 pi (cos a - cos b), partial outer annulus included.
inline double ball_integral_from_rings(const PolarGrid& g,
                                       const std::vector<double>& ring_means,
                                       double R) {
  double total = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    double a = i * g.dr;
    if (a >= R) break;
    double b = std::min((i + 1) * g.dr, R);
    total += ring_means[i] * 2.0 * pi * (std::cos(a) - std::cos(b));
  }
  return total;
}

// d/drho of the spherical mean equals (1/(2 pi sin rho)) int_{B_rho} lap f.
// The left side is a centered difference with step dr; the right side uses
// ring means of the discrete Laplacian.  Reports |lhs - rhs| against tol.
inline InequalityReport spherical_mean_derivative_check(
    const ScalarField& f, Vec3 x, double rho, double tol = -1.0) {
  const PolarGrid& g = f.grid;
  if (!(rho >= g.dr && rho <= pi - 2.0 * g.dr))
    throw std::invalid_argument("spherical_mean_derivative_check: rho out of range");
  if (tol < 0.0) {
    double fmax = 0.0;
    for (double v : f.values) fmax = std::max(fmax, std::abs(v));
    tol = 200.0 * (1.0 + fmax) / (double(g.n_r) * g.n_r);
  }
  double lhs = (spherical_mean(f, x, rho + g.dr) - spherical_mean(f, x, rho - g.dr)) /
               (2.0 * g.dr);
  MeanCurve lap_rings = spherical_mean_curve(laplacian(f), x);
  double rhs = ball_integral_from_rings(g, lap_rings.values, rho) /
               (2.0 * pi * std::sin(rho));
  InequalityReport r;
  r.name = "spherical_mean_derivative_identity";
  r.lhs = std::abs(lhs - rhs);
  r.rhs = 0.0;
  r.tol = tol;
  r.note = "derivative=" + std::to_string(lhs) + " ball_form=" + std::to_string(rhs);
  return finish_report(r);
}

// phi(r1) - phi(r0) <= ||f||_2 (r1 - r0) / sqrt(2 pi) for 0 < r0 < r1 <= pi/2,
// plus the r0 -> 0 limit form phi(r1) - f(x) <= ||f||_2 r1 / sqrt(2 pi).
// The report carries the binding form; pass requires both.
inline InequalityReport spherical_mean_inequality_check(const ScalarField& f, Vec3 x,
                                                        double r0, double r1,
                                                        double tol = 1e-4) {
  if (!(0.0 < r0 && r0 < r1 && r1 <= pi / 2.0 + 1e-12))
    throw std::invalid_argument(
        "spherical_mean_inequality_check: need 0 < r0 < r1 <= pi/2");
  double l2 = lq_norm(f, 2.0);
  double m0 = spherical_mean(f, x, r0);
  double m1 = spherical_mean(f, x, r1);
  double lhs_a = m1 - m0;
  double rhs_a = l2 * (r1 - r0) / std::sqrt(2.0 * pi);
  double lhs_b = m1 - sample(f, x);
  double rhs_b = l2 * r1 / std::sqrt(2.0 * pi);
  InequalityReport r;
  r.name = "spherical_mean_inequality";
  r.tol = tol;
  bool a_binds = (rhs_a - lhs_a) <= (rhs_b - lhs_b);
  r.lhs = a_binds ? lhs_a : lhs_b;
  r.rhs = a_binds ? rhs_a : rhs_b;
  r.note = a_binds ? "binding=interval limit_slack=" + std::to_string(rhs_b - lhs_b)
                   : "binding=limit interval_slack=" + std::to_string(rhs_a - lhs_a);
  return finish_report(r);
}

inline InequalityReport spherical_mean_limit_check(const ScalarField& f, Vec3 x,
                                                   double r1, double tol = 1e-4) {
  InequalityReport r;
  r.name = "spherical_mean_inequality_limit";
  r.tol = tol;
  r.lhs = spherical_mean(f, x, r1) - sample(f, x);
  r.rhs = lq_norm(f, 2.0) * r1 / std::sqrt(2.0 * pi);
  return finish_report(r);
}

// Exact mean of d(., x) over B_R(x): (sin R - R cos R) / (1 - cos R).
inline double mean_distance_in_ball(double R) {
  return (std::sin(R) - R * std::cos(R)) / (1.0 - std::cos(R));
}

// Shifted ball averages for several radii at once (one ring-mean pass).
// Average of f - C d(., x) over B_R(x); the f part is row-value times exact
// annulus measure, the distance part is integrated in closed form, and the
// normalizer is the exact ball area 2 pi (1 - cos R).
inline MeanCurve ball_average_curve(const ScalarField& f, Vec3 x, double C,
                                    const std::vector<double>& radii) {
  const PolarGrid& g = f.grid;
  MeanCurve rings = spherical_mean_curve(f, x);
  MeanCurve out;
  out.center = x;
  out.radii = radii;
  out.values.resize(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j) {
    double R = radii[j];
    if (!(R > 0.0 && R <= pi))
      throw std::invalid_argument("ball_average_curve: radius out of range");
    double f_part = ball_integral_from_rings(g, rings.values, R);
    double d_part = 2.0 * pi * (std::sin(R) - R * std::cos(R));
    out.values[j] = (f_part - C * d_part) / (2.0 * pi * (1.0 - std::cos(R)));
  }
  return out;
}

inline double ball_average_shifted(const ScalarField& f, Vec3 x, double R, double C) {
  return ball_average_curve(f, x, C, {R}).values[0];
}

// Dyadic radius ladder pi/2, pi/4, ..., pi/2^L in increasing order.
inline std::vector<double> dyadic_radii(int L = 8) {
  std::vector<double> radii;
  for (int l = L; l >= 1; --l) radii.push_back(pi / std::pow(2.0, l));
  return radii;
}

// R -> avg_{B_R}(f - C d) is non-increasing on (0, pi/2] when f is NNSC and
// C >= ||f||_2 / sqrt(2 pi).  lhs = worst increase between consecutive radii.
inline InequalityReport ball_average_monotonicity_check(
    const ScalarField& f, Vec3 x, const std::vector<double>& radii, double C,
    double tol = 1e-4) {
  if (radii.size() < 2)
    throw std::invalid_argument("ball_average_monotonicity_check: need >= 2 radii");
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.back() > pi / 2.0 + 1e-12)
    throw std::invalid_argument("ball_average_monotonicity_check: radii must be <= pi/2");
  MeanCurve curve = ball_average_curve(f, x, C, sorted);
  InequalityReport r;
  r.name = "ball_average_monotonicity";
  r.tol = tol;
  r.rhs = 0.0;
  double c_needed = lq_norm(f, 2.0) / std::sqrt(2.0 * pi);
  bool nnsc = nnsc_check_cos(CosMetric{f}).pass;
  r.hypothesis_ok = nnsc && C >= c_needed - 1e-12;
  if (!r.hypothesis_ok)
    r.note = std::string(nnsc ? "" : "hypothesis: not NNSC; ") +
             (C >= c_needed - 1e-12
                  ? ""
                  : "hypothesis: C < ||f||_2/sqrt(2 pi) = " + std::to_string(c_needed));
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < curve.values.size(); ++j) {
    double inc = curve.values[j + 1] - curve.values[j];
    if (inc > worst) {
      worst = inc;
      r.worst_point = long(j);
    }
  }
  r.lhs = worst;
  return finish_report(r);
}

// Lower semicontinuous representative at x: sup of shifted ball averages
// over the dyadic ladder.
inline double lsc_representative(const ScalarField& f, Vec3 x, double C, int L = 8) {
  MeanCurve curve = ball_average_curve(f, x, C, dyadic_radii(L));
  return *std::max_element(curve.values.begin(), curve.values.end());
}

struct TruncationLevel {
  double K = 0.0;
};

// min(f, K); K is nudged by machine-scale jitter while any node value ties it
// exactly, so the cut level is a regular value of the sampled field.
inline ScalarField truncate(const ScalarField& f, TruncationLevel level) {
  double K = level.K;
  bool tie = true;
  while (tie) {
    tie = false;
    for (double v : f.values)
      if (v == K) {
        tie = true;
        break;
      }
    if (tie) K += (1.0 + std::abs(K)) * 1e-13;
  }
  ScalarField out = f;
  for (double& v : out.values) v = std::min(v, K);
  return out;
}

// int u fbar + int <grad u, grad fbar>; nonnegative for truncations of NNSC
// warps against nonnegative test fields.
inline double weak_pairing(const ScalarField& fbar, const ScalarField& u) {
  require_same_grid(fbar, u, "weak_pairing");
  for (double v : u.values)
    if (v < 0.0) throw std::invalid_argument("weak_pairing: test field must be >= 0");
  const PolarGrid& g = fbar.grid;
  double mass = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    double row = 0.0;
    for (int k = 0; k < g.n_theta; ++k) row += u.at(i, k) * fbar.at(i, k);
    mass += row * g.weight(i);
  }
  return mass + dirichlet_energy(u, fbar);
}

// Largest v whose strict sublevel set {f < v} has measure <= delta * 4 pi.
inline double essential_infimum(const ScalarField& f, double delta = 1e-3) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("essential_infimum: need 0 < delta < 1");
  const PolarGrid& g = f.grid;
  std::vector<std::pair<double, double>> vw(f.values.size());
  for (int i = 0; i < g.n_r; ++i)
    for (int k = 0; k < g.n_theta; ++k)
      vw[g.index(i, k)] = {f.at(i, k), g.weight(i)};
  std::sort(vw.begin(), vw.end());
  const double threshold = delta * 4.0 * pi;
  // sup{v : mass{f < v} <= threshold} is the first value whose strictly-below
  // mass exceeds the threshold (the sup extends up to that value inclusive).
  double below = 0.0;
  std::size_t j = 0;
  for (; j + 1 < vw.size(); ++j) {
    below += vw[j].second;
    if (below > threshold) break;
  }
  return vw[j].first;
}

}  // namespace warped

#endif  // WARPED_MEANS_HPP
