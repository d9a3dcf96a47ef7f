#ifndef WARPED_METRICS_HPP
#define WARPED_METRICS_HPP

#include <cmath>
#include <limits>
#include <string>

#include "warped/spheregrid.hpp"

// Warped product metrics and their scalar curvature.
//
//   cos:  g = dr^2 + sin^2(r) dtheta^2 + f(r,theta)^2 dphi^2  on S^2 x S^1
//         Scal = 2 - 2 lap(f) / f;  nonnegative iff lap(f) <= f.
//   soc:  g = dphi^2 + h(phi)^2 g_{S^2}                        on S^1 x S^2
//         Scal = -4 h''/h + 2 (1 - (h')^2) / h^2.

namespace warped {

struct CosMetric {
  ScalarField f;
};

struct SocMetric {
  CircleField h;
};

inline CosMetric make_cos_metric(ScalarField f) {
  for (double v : f.values)
    if (!(v > 0.0)) throw std::invalid_argument("make_cos_metric: warp must be positive");
  return CosMetric{std::move(f)};
}

inline SocMetric make_soc_metric(CircleField h) {
  for (double v : h.values)
    if (!(v > 0.0)) throw std::invalid_argument("make_soc_metric: warp must be positive");
  return SocMetric{std::move(h)};
}

// One verified inequality: pass <=> slack = rhs - lhs >= -tol.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tol = 0.0;
  long worst_point = -1;
  bool pass = false;
  bool hypothesis_ok = true;  // preconditions that are flagged, not fatal
  std::string note;
};

inline InequalityReport finish_report(InequalityReport r) {
  r.slack = r.rhs - r.lhs;
  r.pass = r.slack >= -r.tol;
  return r;
}

// ---------------------------------------------------------------------------
// cos case

inline ScalarField scalar_curvature_cos(const CosMetric& m) {
  ScalarField lap = laplacian(m.f);
  ScalarField out{m.f.grid, std::vector<double>(m.f.grid.size())};
  for (std::size_t n = 0; n < out.values.size(); ++n)
    out.values[n] = 2.0 - 2.0 * lap.values[n] / m.f.values[n];
  return out;
}

// Stencil consistency error of the Laplacian on sup-normalized degree <= 2
// harmonics, measured away from the two rows at each pole (those rows are
// only first-order for m >= 1 modes but carry O(h^2) quadrature weight).
// Degree 2 is the curvature scale of the problem; higher degrees would
// inflate the gauge by ~l^4 and mask genuine violations of order 0.1.
// Scaled by 10 this is the default NNSC tolerance for the grid.
inline double laplacian_consistency_error(const PolarGrid& g) {
  struct Mode { int l, m; };
  const Mode modes[] = {{1, 0}, {2, 0}, {2, 1}, {2, 2}};
  double worst = 0.0;
  for (const Mode& mode : modes) {
    ScalarField y = make_field(g, [&](double r, double th) {
      return std::assoc_legendre(mode.l, mode.m, std::cos(r)) * std::cos(mode.m * th);
    });
    double amp = 0.0;
    for (double v : y.values) amp = std::max(amp, std::abs(v));
    ScalarField lap = laplacian(y);
    const double ev = -double(mode.l) * (mode.l + 1);
    for (int i = 2; i + 2 < g.n_r; ++i)
      for (int k = 0; k < g.n_theta; ++k) {
        double err = std::abs(lap.at(i, k) - ev * y.at(i, k)) / amp;
        worst = std::max(worst, err);
      }
  }
  return worst;
}

inline double nnsc_default_tol(const PolarGrid& g) {
  return 10.0 * laplacian_consistency_error(g);
}

// NNSC <=> max over nodes of (lap f - f) <= tol.
inline InequalityReport nnsc_check_cos(const CosMetric& m, double tol) {
  ScalarField lap = laplacian(m.f);
  InequalityReport r;
  r.name = "nnsc_cos";
  r.tol = tol;
  r.rhs = 0.0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < lap.values.size(); ++n) {
    double v = lap.values[n] - m.f.values[n];
    if (v > worst) {
      worst = v;
      r.worst_point = long(n);
    }
  }
  r.lhs = worst;
  return finish_report(r);
}

inline InequalityReport nnsc_check_cos(const CosMetric& m) {
  return nnsc_check_cos(m, nnsc_default_tol(m.f.grid));
}

// vol(S^2 x_f S^1) = 2 pi * int_{S^2} f.
inline double volume_cos(const CosMetric& m) { return 2.0 * pi * integrate(m.f); }

// ---------------------------------------------------------------------------
// soc case

// Edge-averaged (h')^2: mean of the squared staggered differences on the two
// edges touching the node.  Keeps int Scal h^2 u exactly equal to pairing_soc.
inline CircleField edge_mean_square_derivative(const CircleField& h) {
  CircleField e = edge_derivative(h);
  const int n = h.grid.n_phi;
  CircleField out{h.grid, std::vector<double>(n)};
  for (int k = 0; k < n; ++k) {
    double a = e.values[(k + n - 1) % n], b = e.values[k];
    out.values[k] = 0.5 * (a * a + b * b);
  }
  return out;
}

inline CircleField scalar_curvature_soc(const SocMetric& m) {
  CircleField d2 = second_derivative(m.h);
  CircleField msq = edge_mean_square_derivative(m.h);
  const int n = m.h.grid.n_phi;
  CircleField out{m.h.grid, std::vector<double>(n)};
  for (int k = 0; k < n; ++k) {
    double h = m.h.values[k];
    out.values[k] = -4.0 * d2.values[k] / h + 2.0 * (1.0 - msq.values[k]) / (h * h);
  }
  return out;
}

inline InequalityReport nnsc_check_soc(const SocMetric& m, double tol) {
  CircleField scal = scalar_curvature_soc(m);
  InequalityReport r;
  r.name = "nnsc_soc";
  r.tol = tol;
  r.rhs = 0.0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < scal.values.size(); ++k) {
    double v = -scal.values[k];  // NNSC <=> Scal >= 0 <=> max(-Scal) <= 0
    if (v > worst) {
      worst = v;
      r.worst_point = long(k);
    }
  }
  r.lhs = worst;
  return finish_report(r);
}

inline InequalityReport nnsc_check_soc(const SocMetric& m) {
  double h2 = m.h.grid.dphi * m.h.grid.dphi;
  return nnsc_check_soc(m, 10.0 * h2);
}

// Nonnegative scalar curvature forces |h'| <= 1.  Hypothesis (NNSC) failure
// is flagged; the derivative bound is reported either way.
inline InequalityReport gradient_bound_soc(const SocMetric& m, double tol = 1e-6) {
  InequalityReport nnsc = nnsc_check_soc(m, tol);
  CircleField d1 = derivative(m.h);
  InequalityReport r;
  r.name = "gradient_bound_soc";
  r.tol = tol;
  r.rhs = 1.0;
  r.hypothesis_ok = nnsc.pass;
  if (!nnsc.pass) r.note = "hypothesis: scalar curvature dips to " + std::to_string(-nnsc.lhs);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < d1.values.size(); ++k) {
    double v = std::abs(d1.values[k]);
    if (v > worst) {
      worst = v;
      r.worst_point = long(k);
    }
  }
  r.lhs = worst;
  return finish_report(r);
}

// Mean curvature of the slice {phi} x S^2: H = 2 |h'(phi)| / h(phi).
inline double slice_mean_curvature_soc(const SocMetric& m, double phi) {
  CircleField d1 = derivative(m.h);
  return 2.0 * std::abs(sample_circle(d1, phi)) / sample_circle(m.h, phi);
}

struct SocWarpBounds {
  InequalityReport min_upper;  // min h <= D / pi
  InequalityReport min_lower;  // min h >= sqrt(A / 4 pi)
  InequalityReport max_upper;  // max h <= D / pi + 2 pi
};

// D = diameter, A = MinA lower bound; both are inputs, never derived here.
inline SocWarpBounds soc_min_warp_bounds(const SocMetric& m, double D, double A,
                                         double tol = 1e-9) {
  double hmin = m.h.values[0], hmax = m.h.values[0];
  long imin = 0, imax = 0;
  for (std::size_t k = 1; k < m.h.values.size(); ++k) {
    if (m.h.values[k] < hmin) { hmin = m.h.values[k]; imin = long(k); }
    if (m.h.values[k] > hmax) { hmax = m.h.values[k]; imax = long(k); }
  }
  SocWarpBounds b;
  b.min_upper.name = "soc_min_warp_le_D_over_pi";
  b.min_upper.lhs = hmin;
  b.min_upper.rhs = D / pi;
  b.min_upper.tol = tol;
  b.min_upper.worst_point = imin;
  b.min_upper = finish_report(b.min_upper);

  b.min_lower.name = "soc_min_warp_ge_sqrt_A_over_4pi";
  b.min_lower.lhs = std::sqrt(A / (4.0 * pi));
  b.min_lower.rhs = hmin;
  b.min_lower.tol = tol;
  b.min_lower.worst_point = imin;
  b.min_lower = finish_report(b.min_lower);

  b.max_upper.name = "soc_max_warp_le_D_over_pi_plus_2pi";
  b.max_upper.lhs = hmax;
  b.max_upper.rhs = D / pi + 2.0 * pi;
  b.max_upper.tol = tol;
  b.max_upper.worst_point = imax;
  b.max_upper = finish_report(b.max_upper);
  return b;
}

}  // namespace warped

#endif  // WARPED_METRICS_HPP
