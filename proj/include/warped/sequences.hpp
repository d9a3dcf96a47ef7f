#ifndef WARPED_SEQUENCES_HPP
#define WARPED_SEQUENCES_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "warped/means.hpp"
#include "warped/metrics.hpp"
#include "warped/spheregrid.hpp"

// Warping-function families and their convergence diagnostics.  The log
// spike family C + min(K, -ln(2 sin(r/2))) is the sharp-regularity witness:
// W^{1,p} bounded for p < 2, W^{1,2} unbounded, L^q convergent to its limit
// profile, NNSC throughout (the capped Green's-function profile has
// Laplacian +1/2 off the cap, zero on it, and the corner blend is concave).

namespace warped {

enum class FamilyKind { constant, harmonic, log_spike, soc_constant, soc_harmonic };

struct FamilySpec {
  FamilyKind kind = FamilyKind::constant;
  double c = 1.0;    // constant / harmonic / soc base level
  double eps = 0.0;  // harmonic amplitude
  int l = 2, m = 0;  // harmonic mode
  double C = 1.5;    // log_spike floor
};

inline double log_spike_profile(double r) {
  return -std::log(2.0 * std::sin(r / 2.0));
}

namespace detail {

// Smoothed max(x, 0): quadratic over |x| <= delta, exact outside.  This is
// the degenerate case of the cubic Hermite blend of the two linear branches
// (the cubic coefficient vanishes because the branch slopes are constant),
// and it is convex, which is what makes the blended spike concave.
inline double smooth_relu(double x, double delta) {
  if (x <= -delta) return 0.0;
  if (x >= delta) return x;
  double s = x + delta;
  return s * s / (4.0 * delta);
}

}  // namespace detail

// f = C + K - smooth_relu(K - p), i.e. C + min(K, p) blended over a corner
// band two radial steps wide (delta = |p'(r_c)| * dr at the corner radius).
// delta is capped at 1: once the corner radius falls below the grid step the
// uncapped width diverges like dr/r_c, and members with widths growing
// faster than the level spacing lose the pointwise monotonicity of the
// family.  The cap also keeps the blend inside p in [K-1, K+1], so the tail
// (p < K-1) and the flat cap (r < r_c/4) stay exact.
inline ScalarField log_spike_field(const PolarGrid& g, double K, double C) {
  if (!(C >= 1.0)) throw std::invalid_argument("log_spike_field: need C >= 1");
  if (!(K > 0.0)) throw std::invalid_argument("log_spike_field: need K > 0");
  double rc = 2.0 * std::asin(std::min(0.999, std::exp(-K) / 2.0));
  double delta = std::min(1.0, 0.5 / std::tan(rc / 2.0) * g.dr);
  return make_field(g, [&](double r, double) {
    double p = log_spike_profile(r);
    return C + K - detail::smooth_relu(K - p, delta);
  });
}

inline ScalarField log_spike_limit(const PolarGrid& g, double C) {
  if (!(C >= 1.0)) throw std::invalid_argument("log_spike_limit: need C >= 1");
  return make_field(g, [&](double r, double) { return C + log_spike_profile(r); });
}

struct GeneratedCos {
  std::string name;
  ScalarField f;
  double K = 0.0;  // log_spike level, 0 otherwise
  bool nnsc_verified = false;
  InequalityReport nnsc;
};

struct GeneratedSoc {
  std::string name;
  CircleField h;
  bool nnsc_verified = false;
  InequalityReport nnsc;
};

inline GeneratedCos generate(const FamilySpec& spec, int j, const PolarGrid& g) {
  if (j < 1) throw std::invalid_argument("generate: index must be positive");
  GeneratedCos out;
  switch (spec.kind) {
    case FamilyKind::constant:
      if (!(spec.c > 0.0)) throw std::invalid_argument("generate: need c > 0");
      out.name = "constant_" + std::to_string(spec.c);
      out.f = constant_field(g, spec.c);
      break;
    case FamilyKind::harmonic: {
      out.name = "harmonic_l" + std::to_string(spec.l) + "m" + std::to_string(spec.m);
      int m = spec.m;
      out.f = make_field(g, [&](double r, double theta) {
        return spec.c +
               spec.eps * std::assoc_legendre(spec.l, m, std::cos(r)) *
                   std::cos(m * theta);
      });
      for (double v : out.f.values)
        if (!(v > 0.0))
          throw std::invalid_argument("generate: harmonic amplitude destroys positivity");
      break;
    }
    case FamilyKind::log_spike:
      out.K = std::log(double(j)) + 1.0;
      out.name = "log_spike_j" + std::to_string(j);
      out.f = log_spike_field(g, out.K, spec.C);
      break;
    default:
      throw std::invalid_argument("generate: spec is a circle family");
  }
  out.nnsc = nnsc_check_cos(CosMetric{out.f});
  out.nnsc_verified = out.nnsc.pass;
  return out;
}

inline GeneratedSoc generate_soc(const FamilySpec& spec, int j, const CircleGrid& g) {
  if (j < 1) throw std::invalid_argument("generate_soc: index must be positive");
  GeneratedSoc out;
  switch (spec.kind) {
    case FamilyKind::soc_constant:
      if (!(spec.c > 0.0)) throw std::invalid_argument("generate_soc: need c > 0");
      out.name = "soc_constant_" + std::to_string(spec.c);
      out.h = constant_circle_field(g, spec.c);
      break;
    case FamilyKind::soc_harmonic:
      out.name = "soc_harmonic";
      out.h = make_circle_field(g, [&](double phi) { return spec.c + spec.eps * std::sin(phi); });
      for (double v : out.h.values)
        if (!(v > 0.0))
          throw std::invalid_argument("generate_soc: amplitude destroys positivity");
      break;
    default:
      throw std::invalid_argument("generate_soc: spec is a sphere family");
  }
  out.nnsc = nnsc_check_soc(SocMetric{out.h});
  out.nnsc_verified = out.nnsc.pass;
  return out;
}

// The standing test battery: five NNSC warps plus two capped spikes.  The
// amplitudes sit safely inside the NNSC region (harmonic: (l(l+1)+1) eps
// max|Y| <= c).
inline std::vector<GeneratedCos> nnsc_battery(const PolarGrid& g) {
  std::vector<GeneratedCos> out;
  FamilySpec s;
  s.kind = FamilyKind::constant;
  s.c = 1.0;
  out.push_back(generate(s, 1, g));
  s.c = 2.5;
  out.push_back(generate(s, 1, g));
  s.kind = FamilyKind::harmonic;
  s.c = 3.0; s.eps = 0.5; s.l = 2; s.m = 0;
  out.push_back(generate(s, 1, g));
  s.c = 3.0; s.eps = 0.1; s.l = 2; s.m = 2;
  out.push_back(generate(s, 1, g));
  s.kind = FamilyKind::log_spike;
  s.C = 1.5;
  out.push_back(generate(s, 4, g));
  out.push_back(generate(s, 16, g));
  return out;
}

inline std::vector<GeneratedSoc> soc_battery(const CircleGrid& g) {
  std::vector<GeneratedSoc> out;
  FamilySpec s;
  s.kind = FamilyKind::soc_constant;
  s.c = 1.0;
  out.push_back(generate_soc(s, 1, g));
  s.c = 2.0;
  out.push_back(generate_soc(s, 1, g));
  s.kind = FamilyKind::soc_harmonic;
  s.c = 2.0; s.eps = 0.1;
  out.push_back(generate_soc(s, 1, g));
  s.c = 1.5; s.eps = 0.05;
  out.push_back(generate_soc(s, 1, g));
  return out;
}

// int |grad ln f|^2 <= 4 pi for NNSC warps (edge-based energy).
inline InequalityReport grad_log_bound_check(const ScalarField& f, double tol = 1e-6) {
  ScalarField lf = f;
  for (double& v : lf.values) v = std::log(v);
  InequalityReport r;
  r.name = "grad_log_bound";
  r.lhs = dirichlet_energy(lf, lf);
  r.rhs = 4.0 * pi;
  r.tol = tol;
  r.hypothesis_ok = nnsc_check_cos(CosMetric{f}).pass;
  return finish_report(r);
}

// ||f||_p^p <= 4 pi exp(V p / 8 pi^2 + p^2 / 4) whenever vol(f) <= V.
inline InequalityReport moser_trudinger_check(const ScalarField& f, double p, double V,
                                              double tol = 1e-9) {
  if (!(p >= 1.0)) throw std::invalid_argument("moser_trudinger_check: need p >= 1");
  InequalityReport r;
  r.name = "moser_trudinger";
  r.lhs = std::pow(lq_norm(f, p), p);
  r.rhs = 4.0 * pi * std::exp(V * p / (8.0 * pi * pi) + p * p / 4.0);
  r.tol = tol;
  double vol = volume_cos(CosMetric{f});
  r.hypothesis_ok = nnsc_check_cos(CosMetric{f}).pass && vol <= V * (1.0 + 1e-12);
  r.note = "volume=" + std::to_string(vol);
  return finish_report(r);
}

// Dirichlet energy of f restricted to the cap r >= eps (node-centred); the
// spike limit grows like 2 pi ln(1/eps) as the cap closes on the pole.
inline double cap_dirichlet_energy(const ScalarField& f, double eps) {
  const PolarGrid& g = f.grid;
  ScalarField grad = gradient_norm(f);
  double total = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    if (g.r_nodes[i] < eps) continue;
    for (int k = 0; k < g.n_theta; ++k) {
      double gv = grad.at(i, k);
      total += g.weight(i) * gv * gv;
    }
  }
  return total;
}

struct ConvergenceReport {
  std::vector<int> js;
  std::vector<std::string> names;
  std::vector<double> q_list, p_list;
  std::vector<std::vector<double>> lq_to_last;   // [qi][member]
  std::vector<std::vector<double>> lq_to_limit;  // [qi][member]
  std::vector<std::vector<double>> w1p_norm;     // [pi][member]
  std::vector<double> mt_slack;                  // per member, p = 2, V = own volume
  std::vector<double> gradln_slack;              // per member
  std::vector<std::vector<double>> weak_residual;  // [test][member], vs last member
  std::vector<bool> nnsc;
  std::vector<bool> lq_to_last_monotone;   // per q, strictly decreasing
  std::vector<bool> lq_to_limit_monotone;  // per q
};

inline ConvergenceReport convergence_report(const FamilySpec& spec,
                                            const std::vector<int>& js,
                                            const PolarGrid& g,
                                            const std::vector<double>& p_list,
                                            const std::vector<double>& q_list,
                                            const std::vector<ScalarField>& tests) {
  if (js.size() < 2)
    throw std::invalid_argument("convergence_report: need at least two members");
  ConvergenceReport rep;
  rep.js = js;
  rep.q_list = q_list;
  rep.p_list = p_list;
  std::vector<ScalarField> members;
  for (int j : js) {
    GeneratedCos m = generate(spec, j, g);
    rep.names.push_back(m.name);
    rep.nnsc.push_back(m.nnsc_verified);
    members.push_back(m.f);
  }
  ScalarField limit = (spec.kind == FamilyKind::log_spike)
                          ? log_spike_limit(g, spec.C)
                          : members.back();
  const ScalarField& last = members.back();

  auto dist = [&](const ScalarField& a, const ScalarField& b, double q) {
    ScalarField d = a;
    for (std::size_t n = 0; n < d.values.size(); ++n) d.values[n] = a.values[n] - b.values[n];
    return lq_norm(d, q);
  };
  for (double q : q_list) {
    std::vector<double> dl, dlim;
    for (const ScalarField& m : members) {
      dl.push_back(dist(m, last, q));
      dlim.push_back(dist(m, limit, q));
    }
    auto strictly_down = [](const std::vector<double>& v) {
      for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
      return true;
    };
    rep.lq_to_last_monotone.push_back(strictly_down(dl));
    rep.lq_to_limit_monotone.push_back(strictly_down(dlim));
    rep.lq_to_last.push_back(std::move(dl));
    rep.lq_to_limit.push_back(std::move(dlim));
  }
  for (double p : p_list) {
    std::vector<double> ws;
    for (const ScalarField& m : members) ws.push_back(w1p_norm(m, p));
    rep.w1p_norm.push_back(std::move(ws));
  }
  for (const ScalarField& m : members) {
    double vol = volume_cos(CosMetric{m});
    rep.mt_slack.push_back(moser_trudinger_check(m, 2.0, vol).slack);
    rep.gradln_slack.push_back(grad_log_bound_check(m).slack);
  }
  for (const ScalarField& phi : tests) {
    std::vector<double> res;
    double wlast = weak_pairing(last, phi);
    for (const ScalarField& m : members) res.push_back(std::abs(weak_pairing(m, phi) - wlast));
    rep.weak_residual.push_back(std::move(res));
  }
  return rep;
}

struct CutoffReport {
  double margin = 0.0;  // essential infimum of the truncated limit proxy
  double threshold = 0.0;
  bool bounded_away = false;
};

// Either the limit keeps its essential infimum away from zero or it
// degenerates; the probe reports which side the data lies on.
inline CutoffReport cutoff_dichotomy_probe(const ScalarField& limit_proxy, double K,
                                           double threshold = 1e-2,
                                           double delta = 1e-3) {
  CutoffReport rep;
  rep.threshold = threshold;
  rep.margin = essential_infimum(truncate(limit_proxy, TruncationLevel{K}), delta);
  rep.bounded_away = rep.margin > threshold;
  return rep;
}

}  // namespace warped

#endif  // WARPED_SEQUENCES_HPP
