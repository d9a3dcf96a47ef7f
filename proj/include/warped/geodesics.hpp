#ifndef WARPED_GEODESICS_HPP
#define WARPED_GEODESICS_HPP

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "warped/means.hpp"
#include "warped/metrics.hpp"
#include "warped/spheregrid.hpp"

// Geodesic flow on S^2 x_f S^1.  The warp enters the equations of motion
// through f and its first partials, so the interpolant must be smooth across
// cell boundaries: jumps in the second derivatives random-walk the conserved
// energy above the drift gate over long integrations.  C1Field therefore
// interpolates with a tensor-product bicubic spline -- periodic in theta,
// natural in r on a grid extended by three reflected ghost rows across each
// pole (f(-r, theta) = f(r, theta + pi) holds exactly on the sphere), which
// pushes the natural-end-condition error out of the physical rows.  The
// result is globally C^2 inside the node range; the class name records the
// C^1 floor the integrator relies on.

namespace warped {

class C1Field {
 public:
  explicit C1Field(const ScalarField& f) : grid_(f.grid) {
    const PolarGrid& g = f.grid;
    nt_ = g.n_theta;
    nrx_ = g.n_r + 2 * ghost_;
    std::size_t total = std::size_t(nrx_) * nt_;
    v_.resize(total);
    mt_.resize(total);
    mr_.resize(total);
    mrt_.resize(total);
    for (int i = 0; i < nrx_; ++i) {
      int ip = i - ghost_, shift = 0;
      if (ip < 0) {
        ip = -1 - ip;
        shift = nt_ / 2;
      } else if (ip >= g.n_r) {
        ip = 2 * g.n_r - 1 - ip;
        shift = nt_ / 2;
      }
      for (int k = 0; k < nt_; ++k) v_[idx(i, k)] = f.at(ip, (k + shift) % nt_);
    }
    // Periodic spline in theta along each extended row.
    std::vector<double> line(nt_), m;
    for (int i = 0; i < nrx_; ++i) {
      for (int k = 0; k < nt_; ++k) line[k] = v_[idx(i, k)];
      cyclic_second_derivatives(line, g.dtheta, m);
      for (int k = 0; k < nt_; ++k) mt_[idx(i, k)] = m[k];
    }
    // Natural spline in r down each column, for the values and again for the
    // theta coefficients (the two solves act on different indices, so the
    // mixed array is the same either way around).
    std::vector<double> col(nrx_);
    for (int k = 0; k < nt_; ++k) {
      for (int i = 0; i < nrx_; ++i) col[i] = v_[idx(i, k)];
      natural_second_derivatives(col, g.dr, m);
      for (int i = 0; i < nrx_; ++i) mr_[idx(i, k)] = m[i];
      for (int i = 0; i < nrx_; ++i) col[i] = mt_[idx(i, k)];
      natural_second_derivatives(col, g.dr, m);
      for (int i = 0; i < nrx_; ++i) mrt_[idx(i, k)] = m[i];
    }
  }

  const PolarGrid& grid() const { return grid_; }
  double r_min() const { return grid_.r_nodes.front(); }
  double r_max() const { return grid_.r_nodes.back(); }

  // Value and first partials at (r, theta); r must lie inside the node range.
  void eval(double r, double theta, double& f, double& fr, double& ft) const {
    const PolarGrid& g = grid_;
    int i = int(std::floor((r - g.r_nodes[0]) / g.dr));
    if (i < 0) i = 0;
    if (i > g.n_r - 2) i = g.n_r - 2;
    double u = (r - g.r_nodes[i]) / g.dr;
    int ie = i + ghost_;
    double tw = theta / g.dtheta;
    int k = int(std::floor(tw));
    double t = tw - k;
    k = ((k % nt_) + nt_) % nt_;
    int kp = (k + 1) % nt_;

    const double hr = g.dr, ht = g.dtheta;
    double Ar = 1.0 - u, Br = u;
    double Cr = (Ar * Ar * Ar - Ar) * hr * hr / 6.0;
    double Dr = (Br * Br * Br - Br) * hr * hr / 6.0;
    double Crp = (1.0 - 3.0 * Ar * Ar) * hr / 6.0;
    double Drp = (3.0 * Br * Br - 1.0) * hr / 6.0;

    std::size_t n0k = idx(ie, k), n1k = idx(ie + 1, k);
    std::size_t n0p = idx(ie, kp), n1p = idx(ie + 1, kp);

    // r-direction spline of the values and of the theta coefficients, at the
    // two theta columns of the cell.
    double F0 = Ar * v_[n0k] + Br * v_[n1k] + Cr * mr_[n0k] + Dr * mr_[n1k];
    double F1 = Ar * v_[n0p] + Br * v_[n1p] + Cr * mr_[n0p] + Dr * mr_[n1p];
    double G0 = Ar * mt_[n0k] + Br * mt_[n1k] + Cr * mrt_[n0k] + Dr * mrt_[n1k];
    double G1 = Ar * mt_[n0p] + Br * mt_[n1p] + Cr * mrt_[n0p] + Dr * mrt_[n1p];
    double F0r = (v_[n1k] - v_[n0k]) / hr + Crp * mr_[n0k] + Drp * mr_[n1k];
    double F1r = (v_[n1p] - v_[n0p]) / hr + Crp * mr_[n0p] + Drp * mr_[n1p];
    double G0r = (mt_[n1k] - mt_[n0k]) / hr + Crp * mrt_[n0k] + Drp * mrt_[n1k];
    double G1r = (mt_[n1p] - mt_[n0p]) / hr + Crp * mrt_[n0p] + Drp * mrt_[n1p];

    double At = 1.0 - t, Bt = t;
    double Ct = (At * At * At - At) * ht * ht / 6.0;
    double Dt = (Bt * Bt * Bt - Bt) * ht * ht / 6.0;
    double Ctp = (1.0 - 3.0 * At * At) * ht / 6.0;
    double Dtp = (3.0 * Bt * Bt - 1.0) * ht / 6.0;

    f = At * F0 + Bt * F1 + Ct * G0 + Dt * G1;
    fr = At * F0r + Bt * F1r + Ct * G0r + Dt * G1r;
    ft = (F1 - F0) / ht + Ctp * G0 + Dtp * G1;
  }

 private:
  static constexpr int ghost_ = 3;
  std::size_t idx(int i, int k) const { return std::size_t(i) * nt_ + k; }

  // Tridiagonal solve with unit off-diagonals, diagonal 4 except at the two
  // ends (Thomas algorithm).
  static void solve_tridiag(double b_first, double b_last,
                            const std::vector<double>& rhs, std::vector<double>& x) {
    int n = int(rhs.size());
    std::vector<double> c(n);
    x.assign(n, 0.0);
    double beta = b_first;
    c[0] = 1.0 / beta;
    x[0] = rhs[0] / beta;
    for (int i = 1; i < n; ++i) {
      double diag = (i == n - 1) ? b_last : 4.0;
      beta = diag - c[i - 1];
      c[i] = 1.0 / beta;
      x[i] = (rhs[i] - x[i - 1]) / beta;
    }
    for (int i = n - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
  }

  // Second derivatives of the natural cubic spline through y, uniform step h.
  static void natural_second_derivatives(const std::vector<double>& y, double h,
                                         std::vector<double>& m) {
    int n = int(y.size());
    m.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> rhs(n - 2), sol;
    for (int i = 1; i <= n - 2; ++i)
      rhs[i - 1] = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
    solve_tridiag(4.0, 4.0, rhs, sol);
    for (int i = 1; i <= n - 2; ++i) m[i] = sol[i - 1];
  }

  // Periodic case, via the Sherman-Morrison correction of the cyclic system.
  static void cyclic_second_derivatives(const std::vector<double>& y, double h,
                                        std::vector<double>& m) {
    int n = int(y.size());
    m.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> rhs(n), u(n, 0.0), z, q;
    for (int k = 0; k < n; ++k) {
      double d2 = y[(k + 1) % n] - 2.0 * y[k] + y[(k + n - 1) % n];
      rhs[k] = 6.0 * d2 / (h * h);
    }
    const double gamma = -4.0;
    u[0] = gamma;
    u[n - 1] = 1.0;
    solve_tridiag(4.0 - gamma, 4.0 - 1.0 / gamma, rhs, z);
    solve_tridiag(4.0 - gamma, 4.0 - 1.0 / gamma, u, q);
    double fact = (z[0] + z[n - 1] / gamma) / (1.0 + q[0] + q[n - 1] / gamma);
    for (int k = 0; k < n; ++k) m[k] = z[k] - fact * q[k];
  }

  PolarGrid grid_;
  int nt_ = 0, nrx_ = 0;
  std::vector<double> v_, mt_, mr_, mrt_;
};

struct GeodesicState {
  double r = 0.0, theta = 0.0, phi = 0.0;
  double vr = 0.0, vtheta = 0.0, vphi = 0.0;
};

inline double geodesic_energy(const C1Field& f, const GeodesicState& s) {
  double fv, fr, ft;
  f.eval(s.r, s.theta, fv, fr, ft);
  double sr = std::sin(s.r);
  return s.vr * s.vr + sr * sr * s.vtheta * s.vtheta + fv * fv * s.vphi * s.vphi;
}

inline double killing_momentum(const C1Field& f, const GeodesicState& s) {
  double fv, fr, ft;
  f.eval(s.r, s.theta, fv, fr, ft);
  return fv * fv * s.vphi;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<GeodesicState> states;
  double energy0 = 0.0;
  double killing0 = 0.0;
  double max_energy_drift = 0.0;   // relative to the initial energy
  double max_killing_drift = 0.0;  // relative to the initial energy
  bool aborted = false;            // entered a pole cap
  double abort_time = 0.0;
};

namespace detail {

inline void geodesic_rhs(const C1Field& f, const GeodesicState& s, GeodesicState& d) {
  double fv, fr, ft;
  f.eval(s.r, s.theta, fv, fr, ft);
  double sr = std::sin(s.r), cr = std::cos(s.r);
  d.r = s.vr;
  d.theta = s.vtheta;
  d.phi = s.vphi;
  d.vr = sr * cr * s.vtheta * s.vtheta + fv * fr * s.vphi * s.vphi;
  d.vtheta = (fv * ft * s.vphi * s.vphi - 2.0 * sr * cr * s.vr * s.vtheta) / (sr * sr);
  d.vphi = -2.0 * (fr * s.vr + ft * s.vtheta) * s.vphi / fv;
}

inline GeodesicState axpy(const GeodesicState& s, double a, const GeodesicState& d) {
  return GeodesicState{s.r + a * d.r,       s.theta + a * d.theta, s.phi + a * d.phi,
                       s.vr + a * d.vr,     s.vtheta + a * d.vtheta,
                       s.vphi + a * d.vphi};
}

}  // namespace detail

// Fixed-step RK4.  Pre: the initial point is at least two radial steps from
// either pole; integration aborts (partial trajectory) if the path enters
// the outermost node ring, where the interpolant has no honest data.
inline Trajectory geodesic_integrate(const C1Field& f, GeodesicState s0, double T,
                                     double dt) {
  const PolarGrid& g = f.grid();
  if (!(dt > 0.0) || !(T > 0.0))
    throw std::invalid_argument("geodesic_integrate: need T, dt > 0");
  if (s0.r < 2.0 * g.dr || s0.r > pi - 2.0 * g.dr)
    throw std::invalid_argument("geodesic_integrate: start too close to a pole");
  Trajectory traj;
  long n_steps = long(std::llround(T / dt));
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.energy0 = geodesic_energy(f, s0);
  traj.killing0 = killing_momentum(f, s0);
  traj.times.push_back(0.0);
  traj.states.push_back(s0);
  GeodesicState s = s0, k1, k2, k3, k4;
  for (long n = 1; n <= n_steps; ++n) {
    detail::geodesic_rhs(f, s, k1);
    detail::geodesic_rhs(f, detail::axpy(s, dt / 2.0, k1), k2);
    detail::geodesic_rhs(f, detail::axpy(s, dt / 2.0, k2), k3);
    detail::geodesic_rhs(f, detail::axpy(s, dt, k3), k4);
    GeodesicState next = s;
    next.r += dt / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
    next.theta += dt / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta);
    next.phi += dt / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
    next.vr += dt / 6.0 * (k1.vr + 2.0 * k2.vr + 2.0 * k3.vr + k4.vr);
    next.vtheta += dt / 6.0 * (k1.vtheta + 2.0 * k2.vtheta + 2.0 * k3.vtheta + k4.vtheta);
    next.vphi += dt / 6.0 * (k1.vphi + 2.0 * k2.vphi + 2.0 * k3.vphi + k4.vphi);
    if (next.r < f.r_min() + g.dr / 2.0 || next.r > f.r_max() - g.dr / 2.0) {
      traj.aborted = true;
      traj.abort_time = n * dt;
      break;
    }
    s = next;
    traj.times.push_back(n * dt);
    traj.states.push_back(s);
    double e = geodesic_energy(f, s);
    double km = killing_momentum(f, s);
    double scale = std::max(traj.energy0, 1e-300);
    traj.max_energy_drift =
        std::max(traj.max_energy_drift, std::abs(e - traj.energy0) / scale);
    traj.max_killing_drift =
        std::max(traj.max_killing_drift, std::abs(km - traj.killing0) / scale);
  }
  return traj;
}

struct ClosureEvent {
  bool found = false;
  double period = 0.0;
  double length = 0.0;       // sqrt(energy0) * period
  long winding = 0;          // fiber winding number over one period
  double position_gap = 0.0;
  double angle_gap = 0.0;
};

// First return to the initial point with matching direction.  Positions are
// compared in the Riemannian metric at the start point (phi modulo 2 pi),
// directions as orthonormal-frame unit vectors.  The sample spacing limits
// the miss distance at the true period to ~ dt * speed / 2, which is above
// pos_tol at the default step, so the squared gap is refined by a parabola
// through the local minimum sample and its neighbours before the gate.
inline ClosureEvent first_closure(const C1Field& f, const Trajectory& traj,
                                  double pos_tol = 1e-4, double ang_tol = 1e-3) {
  ClosureEvent ev;
  std::size_t n = traj.states.size();
  if (n < 4) return ev;
  const GeodesicState& a = traj.states.front();
  double fv, fr, ft;
  f.eval(a.r, a.theta, fv, fr, ft);
  double sr = std::sin(a.r);
  double e0 = std::sqrt(std::max(traj.energy0, 1e-300));
  double fa[3] = {a.vr / e0, sr * a.vtheta / e0, fv * a.vphi / e0};
  double dt = traj.times[1] - traj.times[0];
  double coarse = std::max(pos_tol, 1.5 * dt * e0);

  std::vector<double> g2(n);
  for (std::size_t j = 0; j < n; ++j) {
    const GeodesicState& b = traj.states[j];
    double dth = std::remainder(b.theta - a.theta, 2.0 * pi);
    double dph = std::remainder(b.phi - a.phi, 2.0 * pi);
    g2[j] = (b.r - a.r) * (b.r - a.r) + sr * sr * dth * dth + fv * fv * dph * dph;
  }
  // Skip the leading samples: every trajectory trivially matches itself.
  std::size_t j0 = std::size_t(10);
  for (std::size_t j = j0 + 1; j + 1 < n; ++j) {
    if (g2[j] > coarse * coarse) continue;
    if (!(g2[j] <= g2[j - 1] && g2[j] <= g2[j + 1])) continue;
    const GeodesicState& b = traj.states[j];
    double eb = std::sqrt(std::max(geodesic_energy(f, b), 1e-300));
    double fb[3] = {b.vr / eb, sr * b.vtheta / eb, fv * b.vphi / eb};
    double c = fa[0] * fb[0] + fa[1] * fb[1] + fa[2] * fb[2];
    double ang = std::acos(std::min(1.0, std::max(-1.0, c)));
    if (ang >= ang_tol) continue;
    double denom = g2[j - 1] - 2.0 * g2[j] + g2[j + 1];
    double tstar = traj.times[j], g2star = g2[j];
    if (denom > 0.0) {
      double delta = 0.5 * (g2[j - 1] - g2[j + 1]) / denom;
      delta = std::min(1.0, std::max(-1.0, delta));
      tstar += delta * dt;
      g2star = g2[j] - 0.25 * (g2[j - 1] - g2[j + 1]) * delta;
    }
    double gap = std::sqrt(std::max(g2star, 0.0));
    if (gap >= pos_tol) continue;
    ev.found = true;
    ev.period = tstar;
    ev.length = e0 * tstar;
    ev.winding = std::lround((b.phi - a.phi) / (2.0 * pi));
    ev.position_gap = gap;
    ev.angle_gap = ang;
    return ev;
  }
  return ev;
}

enum class GeodesicClass { open, wraps_fiber, base_geodesic, violation };

inline const char* to_string(GeodesicClass c) {
  switch (c) {
    case GeodesicClass::open: return "open";
    case GeodesicClass::wraps_fiber: return "wraps_fiber";
    case GeodesicClass::base_geodesic: return "base_geodesic";
    default: return "violation";
  }
}

// Closed geodesics either wrap the fiber or live in the base: the Killing
// momentum f^2 phi' is conserved, so a nonzero value forces phi to be
// strictly monotone and any closed orbit to wind.  A closed orbit with zero
// winding and Killing momentum above tolerance contradicts that and is
// flagged as a violation.
inline GeodesicClass classify_geodesic(const C1Field& f, const Trajectory& traj,
                                       const ClosureEvent& ev,
                                       double killing_tol = 1e-6) {
  if (!ev.found) return GeodesicClass::open;
  if (ev.winding != 0) return GeodesicClass::wraps_fiber;
  double scale = std::max(traj.energy0, 1e-300);
  if (std::abs(traj.killing0) <= killing_tol * scale) return GeodesicClass::base_geodesic;
  return GeodesicClass::violation;
}

struct DichotomyReport {
  int n_seeds = 0;
  int n_open = 0;
  int n_wraps_fiber = 0;
  int n_base = 0;
  int n_violation = 0;
  int n_aborted = 0;  // counted under open
  double worst_energy_drift = 0.0;
};

inline DichotomyReport dichotomy_check(const C1Field& f, int n_seeds, double T,
                                       double dt, unsigned rng_seed = 20260813) {
  DichotomyReport rep;
  rep.n_seeds = n_seeds;
  std::mt19937 rng(rng_seed);
  const PolarGrid& g = f.grid();
  double lo = std::max(0.35, 2.0 * g.dr), hi = pi - lo;
  std::uniform_real_distribution<double> ur(lo, hi), uang(0.0, 2.0 * pi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int s = 0; s < n_seeds; ++s) {
    GeodesicState st;
    st.r = ur(rng);
    st.theta = uang(rng);
    st.phi = uang(rng);
    double a = gauss(rng), b = gauss(rng), c = gauss(rng);
    double norm = std::sqrt(a * a + b * b + c * c);
    if (norm < 1e-12) { a = 1.0; norm = 1.0; }
    double fv, fr, ft;
    f.eval(st.r, st.theta, fv, fr, ft);
    st.vr = a / norm;
    st.vtheta = b / norm / std::sin(st.r);
    st.vphi = c / norm / fv;
    Trajectory traj = geodesic_integrate(f, st, T, dt);
    rep.worst_energy_drift = std::max(rep.worst_energy_drift, traj.max_energy_drift);
    if (traj.aborted) {
      ++rep.n_aborted;
      ++rep.n_open;
      continue;
    }
    switch (classify_geodesic(f, traj, first_closure(f, traj))) {
      case GeodesicClass::open: ++rep.n_open; break;
      case GeodesicClass::wraps_fiber: ++rep.n_wraps_fiber; break;
      case GeodesicClass::base_geodesic: ++rep.n_base; break;
      default: ++rep.n_violation;
    }
  }
  return rep;
}

struct SystoleBound {
  double fiber_bound = 0.0;    // min(2 pi, 2 pi min f)
  double uniform_bound = 0.0;  // min(2 pi, (pi/2) ess inf f)
  double min_f = 0.0;
  double ess_inf = 0.0;
};

// Closed geodesics either wrap the fiber (length >= 2 pi min f) or project
// to closed base geodesics (length >= 2 pi on the round sphere); the uniform
// variant survives L^1 limits because it only sees the essential infimum.
inline SystoleBound systole_lower_bound_cos(const CosMetric& m, double delta = 1e-3) {
  SystoleBound b;
  b.min_f = *std::min_element(m.f.values.begin(), m.f.values.end());
  b.ess_inf = essential_infimum(m.f, delta);
  b.fiber_bound = std::min(2.0 * pi, 2.0 * pi * b.min_f);
  b.uniform_bound = std::min(2.0 * pi, pi / 2.0 * b.ess_inf);
  return b;
}

}  // namespace warped

#endif  // WARPED_GEODESICS_HPP
