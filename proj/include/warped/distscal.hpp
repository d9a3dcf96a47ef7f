#ifndef WARPED_DISTSCAL_HPP
#define WARPED_DISTSCAL_HPP

#include <cmath>
#include <vector>

#include "warped/metrics.hpp"
#include "warped/spheregrid.hpp"

// Distributional scalar curvature for both warped products, written as
// div V + F against the unwarped slice measure.  The pairing against a test
// function moves the divergence onto the test weakly; the two summands are
// exposed separately because their individual growth under refinement is
// what detects a genuine curvature singularity while the sum stays tame.
//
// Test functions enter reduced: ubar is the fiber integral of u.  For
// S^2 x_f S^1 that is ubar(r,theta) = int u dphi (u == 1 gives 2 pi); for
// S^1 x_h S^2 it is ubar(phi) = int_{S^2} u dsigma against the unit round
// measure (u == 1 gives 4 pi).

namespace warped {

// V = -2 grad(ln f), F = 2 - 2 |grad f|^2 / f^2, so Scal = div V + F with
// the divergence taken against the round S^2 measure.
struct LLDataCos {
  ScalarField V_r;      // radial component of V
  ScalarField V_theta;  // contravariant theta component
  ScalarField F;
};

inline LLDataCos ll_assemble_cos(const CosMetric& m) {
  const PolarGrid& g = m.f.grid;
  LLDataCos d{m.f, m.f, m.f};
  for (int i = 0; i < g.n_r; ++i) {
    double inv_s2 = 1.0 / (g.sin_r[i] * g.sin_r[i]);
    for (int k = 0; k < g.n_theta; ++k) {
      double fv = m.f.at(i, k);
      double fm = (i == 0) ? pole_ghost(m.f, 0, k) : m.f.at(i - 1, k);
      double fp = (i == g.n_r - 1) ? pole_ghost(m.f, g.n_r - 1, k) : m.f.at(i + 1, k);
      double fr = (fp - fm) / (2.0 * g.dr);
      int km = (k + g.n_theta - 1) % g.n_theta, kp = (k + 1) % g.n_theta;
      double ft = (m.f.at(i, kp) - m.f.at(i, km)) / (2.0 * g.dtheta);
      d.V_r.values[g.index(i, k)] = -2.0 * fr / fv;
      d.V_theta.values[g.index(i, k)] = -2.0 * ft / fv * inv_s2;
      double grad2 = fr * fr + inv_s2 * ft * ft;
      d.F.values[g.index(i, k)] = 2.0 - 2.0 * grad2 / (fv * fv);
    }
  }
  return d;
}

struct LLSplit {
  double first = 0.0;      // divergence part, paired weakly
  double second = 0.0;     // zeroth-order part
  double pairing = 0.0;    // independent assembly of first + second
  double classical = 0.0;  // pointwise Scal integrated against the test
};

// <Scal, u> = 2 int grad f . grad ubar dmu + 2 int f ubar dmu.  The split:
//   first  = 2 E(f, ubar) + S   (S = int 2 (ubar/f) |grad f|^2 dmu)
//   second = int 2 f ubar dmu - S
// S cancels in the sum; each half alone diverges when f develops a spike.
inline LLSplit ll_split_cos(const CosMetric& m, const ScalarField& ubar) {
  require_same_grid(m.f, ubar, "ll_split_cos");
  const PolarGrid& g = m.f.grid;
  ScalarField grad = gradient_norm(m.f);
  double S = 0.0, vol_term = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    double w = g.weight(i);
    for (int k = 0; k < g.n_theta; ++k) {
      double fv = m.f.at(i, k), ub = ubar.at(i, k);
      double gn = grad.at(i, k);
      S += w * 2.0 * ub * gn * gn / fv;
      vol_term += w * 2.0 * fv * ub;
    }
  }
  double E = dirichlet_energy(m.f, ubar);
  LLSplit out;
  out.first = 2.0 * E + S;
  out.second = vol_term - S;
  out.pairing = 2.0 * E + vol_term;
  ScalarField scal = scalar_curvature_cos(m);
  double cl = 0.0;
  for (int i = 0; i < g.n_r; ++i)
    for (int k = 0; k < g.n_theta; ++k)
      cl += g.weight(i) * scal.at(i, k) * m.f.at(i, k) * ubar.at(i, k);
  out.classical = cl;
  return out;
}

inline double pairing_cos(const CosMetric& m, const ScalarField& ubar) {
  require_same_grid(m.f, ubar, "pairing_cos");
  double vol_term = 0.0;
  const PolarGrid& g = m.f.grid;
  for (int i = 0; i < g.n_r; ++i)
    for (int k = 0; k < g.n_theta; ++k)
      vol_term += g.weight(i) * 2.0 * m.f.at(i, k) * ubar.at(i, k);
  return 2.0 * dirichlet_energy(m.f, ubar) + vol_term;
}

// Total scalar curvature int Scal dvol = 4 pi int f dmu (u == 1 reduction).
inline double total_scalar_cos(const CosMetric& m) {
  return 4.0 * pi * integrate(m.f);
}

// V = -4 h'/h, F = (2 - 6 (h')^2) / h^2, divergence against dphi, volume
// density h^2 (times the unit round measure on the slice).
struct LLDataSoc {
  CircleField V;
  CircleField F;
};

inline LLDataSoc ll_assemble_soc(const SocMetric& m) {
  const CircleGrid& g = m.h.grid;
  LLDataSoc d{m.h, m.h};
  CircleField hp = derivative(m.h);
  for (int k = 0; k < g.n_phi; ++k) {
    double h = m.h.values[k], dp = hp.values[k];
    d.V.values[k] = -4.0 * dp / h;
    d.F.values[k] = (2.0 - 6.0 * dp * dp) / (h * h);
  }
  return d;
}

// Staggered realization on circle edges.  With e = D+ h per edge and edge
// midpoint averages, summation by parts is exact, so pairing equals the
// classical route to roundoff:
//   first  = sum_e [ 8 e^2 ubar_e + 4 e h_e (D+ ubar) ] dphi
//   second = sum_k 2 ubar_k dphi - sum_e 6 e^2 ubar_e dphi
inline LLSplit ll_split_soc(const SocMetric& m, const CircleField& ubar) {
  const CircleGrid& g = m.h.grid;
  if (g.n_phi != ubar.grid.n_phi)
    throw std::invalid_argument("ll_split_soc: grid mismatch");
  LLSplit out;
  double first = 0.0, edge2 = 0.0, zero = 0.0;
  for (int k = 0; k < g.n_phi; ++k) {
    int kp = (k + 1) % g.n_phi;
    double e = (m.h.values[kp] - m.h.values[k]) / g.dphi;
    double ue = 0.5 * (ubar.values[k] + ubar.values[kp]);
    double he = 0.5 * (m.h.values[k] + m.h.values[kp]);
    double du = (ubar.values[kp] - ubar.values[k]) / g.dphi;
    first += (8.0 * e * e * ue + 4.0 * e * he * du) * g.dphi;
    edge2 += 6.0 * e * e * ue * g.dphi;
    zero += 2.0 * ubar.values[k] * g.dphi;
  }
  out.first = first;
  out.second = zero - edge2;
  out.pairing = out.first + out.second;
  CircleField scal = scalar_curvature_soc(m);
  double cl = 0.0;
  for (int k = 0; k < g.n_phi; ++k)
    cl += scal.values[k] * m.h.values[k] * m.h.values[k] * ubar.values[k] * g.dphi;
  out.classical = cl;
  return out;
}

inline double pairing_soc(const SocMetric& m, const CircleField& ubar) {
  return ll_split_soc(m, ubar).pairing;
}

inline double total_scalar_soc(const SocMetric& m) {
  CircleField ub = constant_circle_field(m.h.grid, 4.0 * pi);
  return pairing_soc(m, ub);
}

}  // namespace warped

#endif  // WARPED_DISTSCAL_HPP
