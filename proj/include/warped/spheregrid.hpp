#ifndef WARPED_SPHEREGRID_HPP
#define WARPED_SPHEREGRID_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

// Half-offset polar grid on the round 2-sphere and a periodic grid on the
// circle, with the quadrature, differential, and resampling operators the
// rest of the library is built on.
//
// Conventions:
//   r_i     = (i + 1/2) * pi / n_r          (no node sits on a pole)
//   theta_k = 2*pi*k / n_theta
//   w_ik    = sin(r_i) * (pi/n_r) * (2*pi/n_theta)
//   Laplacian = trace of the Hessian, so on the sphere
//   lap f = f_rr + cot(r) f_r + f_thth / sin^2(r).

namespace warped {

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------
// small vectors / rotations

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) {
  double n = norm(a);
  return {a.x / n, a.y / n, a.z / n};
}

// Polar coordinates (r, theta): r = distance from the north pole (0,0,1).
inline Vec3 sph_to_vec(double r, double theta) {
  return {std::sin(r) * std::cos(theta), std::sin(r) * std::sin(theta), std::cos(r)};
}

inline void vec_to_sph(Vec3 v, double& r, double& theta) {
  double rho = std::hypot(v.x, v.y);
  r = std::atan2(rho, v.z);
  theta = (rho == 0.0) ? 0.0 : std::atan2(v.y, v.x);
  if (theta < 0.0) theta += 2.0 * pi;
}

// Angle between unit vectors, stable near 0 and pi.
inline double geodesic_distance(Vec3 a, Vec3 b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

struct Mat3 {
  double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
};

inline Vec3 apply(const Mat3& R, Vec3 v) {
  return {R.m[0][0] * v.x + R.m[0][1] * v.y + R.m[0][2] * v.z,
          R.m[1][0] * v.x + R.m[1][1] * v.y + R.m[1][2] * v.z,
          R.m[2][0] * v.x + R.m[2][1] * v.y + R.m[2][2] * v.z};
}

inline Mat3 transpose(const Mat3& R) {
  Mat3 T;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) T.m[i][j] = R.m[j][i];
  return T;
}

// Rotation taking the north pole to `center` (rotation about north x center).
// center = north gives the identity; center = south flips about the x-axis.
inline Mat3 rotation_to_pole(Vec3 center) {
  if (std::abs(norm(center) - 1.0) > 1e-12)
    throw std::invalid_argument("rotation_to_pole: center must be a unit vector");
  Vec3 north{0.0, 0.0, 1.0};
  Vec3 axis = cross(north, center);
  double s = norm(axis), c = dot(north, center);
  Mat3 R;
  if (s < 1e-15) {
    if (c > 0.0) return R;  // identity
    R.m[0][0] = 1.0; R.m[1][1] = -1.0; R.m[2][2] = -1.0;  // pi about x-axis
    return R;
  }
  Vec3 u = {axis.x / s, axis.y / s, axis.z / s};
  double t = 1.0 - c;
  R.m[0][0] = c + t * u.x * u.x;
  R.m[0][1] = t * u.x * u.y - s * u.z;
  R.m[0][2] = t * u.x * u.z + s * u.y;
  R.m[1][0] = t * u.y * u.x + s * u.z;
  R.m[1][1] = c + t * u.y * u.y;
  R.m[1][2] = t * u.y * u.z - s * u.x;
  R.m[2][0] = t * u.z * u.x - s * u.y;
  R.m[2][1] = t * u.z * u.y + s * u.x;
  R.m[2][2] = c + t * u.z * u.z;
  return R;
}

// ---------------------------------------------------------------------------
// sphere grid

struct PolarGrid {
  int n_r = 0;
  int n_theta = 0;
  double dr = 0.0;
  double dtheta = 0.0;
  std::vector<double> r_nodes;      // (i + 1/2) dr
  std::vector<double> theta_nodes;  // k dtheta
  std::vector<double> sin_r;        // sin(r_i)
  std::vector<double> sin_edge;     // sin(i dr), i = 0..n_r; endpoints exactly 0

  std::size_t size() const { return std::size_t(n_r) * std::size_t(n_theta); }
  std::size_t index(int i, int k) const { return std::size_t(i) * n_theta + k; }
  double weight(int i) const { return sin_r[i] * dr * dtheta; }
  bool same_shape(const PolarGrid& o) const {
    return n_r == o.n_r && n_theta == o.n_theta;
  }
};

inline PolarGrid make_polar_grid(int n_r, int n_theta) {
  if (n_r < 4 || n_theta < 4)
    throw std::invalid_argument("make_polar_grid: need n_r >= 4 and n_theta >= 4");
  PolarGrid g;
  g.n_r = n_r;
  g.n_theta = n_theta;
  g.dr = pi / n_r;
  g.dtheta = 2.0 * pi / n_theta;
  g.r_nodes.resize(n_r);
  g.sin_r.resize(n_r);
  for (int i = 0; i < n_r; ++i) {
    g.r_nodes[i] = (i + 0.5) * g.dr;
    g.sin_r[i] = std::sin(g.r_nodes[i]);
  }
  g.theta_nodes.resize(n_theta);
  for (int k = 0; k < n_theta; ++k) g.theta_nodes[k] = k * g.dtheta;
  g.sin_edge.resize(n_r + 1);
  for (int i = 0; i <= n_r; ++i) g.sin_edge[i] = std::sin(i * g.dr);
  g.sin_edge[0] = 0.0;
  g.sin_edge[n_r] = 0.0;  // sin(pi), exact pole closure
  return g;
}

struct ScalarField {
  PolarGrid grid;
  std::vector<double> values;  // row-major (i, k)

  double& at(int i, int k) { return values[grid.index(i, k)]; }
  double at(int i, int k) const { return values[grid.index(i, k)]; }
};

inline ScalarField make_field(const PolarGrid& g,
                              const std::function<double(double, double)>& fn) {
  ScalarField f{g, std::vector<double>(g.size())};
  for (int i = 0; i < g.n_r; ++i)
    for (int k = 0; k < g.n_theta; ++k)
      f.at(i, k) = fn(g.r_nodes[i], g.theta_nodes[k]);
  return f;
}

inline ScalarField constant_field(const PolarGrid& g, double c) {
  return ScalarField{g, std::vector<double>(g.size(), c)};
}

inline void require_same_grid(const ScalarField& a, const ScalarField& b,
                              const char* who) {
  if (!a.grid.same_shape(b.grid))
    throw std::invalid_argument(std::string(who) + ": fields on different grids");
}

inline double integrate(const ScalarField& f) {
  const PolarGrid& g = f.grid;
  double total = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    double row = 0.0;
    for (int k = 0; k < g.n_theta; ++k) row += f.at(i, k);
    total += row * g.weight(i);
  }
  return total;
}

inline double integrate_product(const ScalarField& f, const ScalarField& u) {
  require_same_grid(f, u, "integrate_product");
  const PolarGrid& g = f.grid;
  double total = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    double row = 0.0;
    for (int k = 0; k < g.n_theta; ++k) row += f.at(i, k) * u.at(i, k);
    total += row * g.weight(i);
  }
  return total;
}

// Conservative flux form of f_rr + cot(r) f_r + f_thth/sin^2 r.  The radial
// flux points i*dr straddle each node symmetrically (half-offset grid), so the
// stencil is second-order everywhere; sin_edge = 0 at r = 0, pi closes the
// poles without ghost rows.  Exactly adjoint to dirichlet_energy below and
// annihilates constants exactly.
inline ScalarField laplacian(const ScalarField& f) {
  const PolarGrid& g = f.grid;
  ScalarField out{g, std::vector<double>(g.size())};
  const double inv_dr2 = 1.0 / (g.dr * g.dr);
  const double inv_dth2 = 1.0 / (g.dtheta * g.dtheta);
  for (int i = 0; i < g.n_r; ++i) {
    const double s_lo = g.sin_edge[i], s_hi = g.sin_edge[i + 1];
    const double inv_s = 1.0 / g.sin_r[i];
    const double inv_s2 = inv_s * inv_s;
    for (int k = 0; k < g.n_theta; ++k) {
      const int km = (k == 0) ? g.n_theta - 1 : k - 1;
      const int kp = (k == g.n_theta - 1) ? 0 : k + 1;
      const double c = f.at(i, k);
      double flux = 0.0;
      if (i + 1 < g.n_r) flux += s_hi * (f.at(i + 1, k) - c);
      if (i > 0) flux -= s_lo * (c - f.at(i - 1, k));
      const double radial = inv_s * flux * inv_dr2;
      const double azimuthal = inv_s2 * (f.at(i, kp) - 2.0 * c + f.at(i, km)) * inv_dth2;
      out.at(i, k) = radial + azimuthal;
    }
  }
  return out;
}

// Edge-based energy: integrate(f * laplacian(u)) == -dirichlet_energy(f, u)
// exactly (summation by parts telescopes; pole fluxes vanish).
inline double dirichlet_energy(const ScalarField& f, const ScalarField& u) {
  require_same_grid(f, u, "dirichlet_energy");
  const PolarGrid& g = f.grid;
  const double wr = g.dtheta / g.dr;        // sin_edge * dr * dtheta / dr^2
  const double wt = g.dr / g.dtheta;        // (1/sin_r) * dr * dtheta / dtheta^2
  double total = 0.0;
  for (int i = 0; i + 1 < g.n_r; ++i) {
    const double s = g.sin_edge[i + 1];
    double acc = 0.0;
    for (int k = 0; k < g.n_theta; ++k)
      acc += (f.at(i + 1, k) - f.at(i, k)) * (u.at(i + 1, k) - u.at(i, k));
    total += wr * s * acc;
  }
  for (int i = 0; i < g.n_r; ++i) {
    const double inv_s = 1.0 / g.sin_r[i];
    double acc = 0.0;
    for (int k = 0; k < g.n_theta; ++k) {
      const int kp = (k == g.n_theta - 1) ? 0 : k + 1;
      acc += (f.at(i, kp) - f.at(i, k)) * (u.at(i, kp) - u.at(i, k));
    }
    total += wt * inv_s * acc;
  }
  return total;
}

// Across-pole ghost value: the point (r_0 - dr, theta) is (r_0, theta + pi).
inline double pole_ghost(const ScalarField& f, int row, double theta_index) {
  const PolarGrid& g = f.grid;
  double kk = theta_index + g.n_theta / 2.0;
  int k0 = int(std::floor(kk));
  double frac = kk - k0;
  int a = ((k0 % g.n_theta) + g.n_theta) % g.n_theta;
  int b = (a + 1) % g.n_theta;
  return (1.0 - frac) * f.at(row, a) + frac * f.at(row, b);
}

// Pointwise |grad f| = sqrt(f_r^2 + f_th^2 / sin^2 r), centered differences;
// pole rows take the radial neighbour across the pole.
inline ScalarField gradient_norm(const ScalarField& f) {
  const PolarGrid& g = f.grid;
  ScalarField out{g, std::vector<double>(g.size())};
  for (int i = 0; i < g.n_r; ++i) {
    const double inv_s = 1.0 / g.sin_r[i];
    for (int k = 0; k < g.n_theta; ++k) {
      const int km = (k == 0) ? g.n_theta - 1 : k - 1;
      const int kp = (k == g.n_theta - 1) ? 0 : k + 1;
      double below = (i > 0) ? f.at(i - 1, k) : pole_ghost(f, 0, k);
      double above = (i + 1 < g.n_r) ? f.at(i + 1, k) : pole_ghost(f, g.n_r - 1, k);
      double fr = (above - below) / (2.0 * g.dr);
      double ft = (f.at(i, kp) - f.at(i, km)) / (2.0 * g.dtheta);
      out.at(i, k) = std::sqrt(fr * fr + ft * ft * inv_s * inv_s);
    }
  }
  return out;
}

inline double lq_norm(const ScalarField& f, double q) {
  if (q < 1.0) throw std::invalid_argument("lq_norm: q must be >= 1");
  const PolarGrid& g = f.grid;
  double total = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    double row = 0.0;
    for (int k = 0; k < g.n_theta; ++k) row += std::pow(std::abs(f.at(i, k)), q);
    total += row * g.weight(i);
  }
  return std::pow(total, 1.0 / q);
}

inline double w1p_norm(const ScalarField& f, double p) {
  if (p < 1.0) throw std::invalid_argument("w1p_norm: p must be >= 1");
  double a = lq_norm(f, p), b = lq_norm(gradient_norm(f), p);
  return std::pow(std::pow(a, p) + std::pow(b, p), 1.0 / p);
}

// Bilinear sample with periodic wrap in theta and constant radial
// extrapolation past the outermost node rows.
inline double sample(const ScalarField& f, double r, double theta) {
  const PolarGrid& g = f.grid;
  double ri = r / g.dr - 0.5;
  double clamped = std::clamp(ri, 0.0, double(g.n_r - 1));
  int i0 = std::min(int(clamped), g.n_r - 2);
  if (g.n_r == 1) i0 = 0;
  double fr = std::clamp(clamped - i0, 0.0, 1.0);
  double tk = theta / g.dtheta;
  double kf = std::floor(tk);
  double ft = tk - kf;
  int k0 = int(kf) % g.n_theta;
  if (k0 < 0) k0 += g.n_theta;
  int k1 = (k0 + 1) % g.n_theta;
  double lo = (1.0 - ft) * f.at(i0, k0) + ft * f.at(i0, k1);
  double hi = (1.0 - ft) * f.at(i0 + 1, k0) + ft * f.at(i0 + 1, k1);
  return (1.0 - fr) * lo + fr * hi;
}

inline double sample(const ScalarField& f, Vec3 p) {
  double r, theta;
  vec_to_sph(normalized(p), r, theta);
  return sample(f, r, theta);
}

// Resample under a rotation: out(x) = f(R x) for grid points x.
inline ScalarField rotate_field(const ScalarField& f, const Mat3& R) {
  const PolarGrid& g = f.grid;
  ScalarField out{g, std::vector<double>(g.size())};
  for (int i = 0; i < g.n_r; ++i)
    for (int k = 0; k < g.n_theta; ++k) {
      Vec3 y = apply(R, sph_to_vec(g.r_nodes[i], g.theta_nodes[k]));
      double r, theta;
      vec_to_sph(y, r, theta);
      out.at(i, k) = sample(f, r, theta);
    }
  return out;
}

// Field in the frame whose north pole is `center` (unit vector to 1e-12).
inline ScalarField rotate_to_pole(const ScalarField& f, Vec3 center) {
  return rotate_field(f, rotation_to_pole(center));
}

// ---------------------------------------------------------------------------
// circle grid

struct CircleGrid {
  int n_phi = 0;
  double dphi = 0.0;
  std::vector<double> phi_nodes;

  std::size_t size() const { return std::size_t(n_phi); }
};

inline CircleGrid make_circle_grid(int n_phi) {
  if (n_phi < 4) throw std::invalid_argument("make_circle_grid: need n_phi >= 4");
  CircleGrid g;
  g.n_phi = n_phi;
  g.dphi = 2.0 * pi / n_phi;
  g.phi_nodes.resize(n_phi);
  for (int k = 0; k < n_phi; ++k) g.phi_nodes[k] = k * g.dphi;
  return g;
}

struct CircleField {
  CircleGrid grid;
  std::vector<double> values;
};

inline CircleField make_circle_field(const CircleGrid& g,
                                     const std::function<double(double)>& fn) {
  CircleField f{g, std::vector<double>(g.size())};
  for (int k = 0; k < g.n_phi; ++k) f.values[k] = fn(g.phi_nodes[k]);
  return f;
}

inline CircleField constant_circle_field(const CircleGrid& g, double c) {
  return CircleField{g, std::vector<double>(g.size(), c)};
}

inline double integrate_circle(const CircleField& f) {
  double total = 0.0;
  for (double v : f.values) total += v;
  return total * f.grid.dphi;
}

inline CircleField derivative(const CircleField& f) {
  const int n = f.grid.n_phi;
  CircleField out{f.grid, std::vector<double>(n)};
  for (int k = 0; k < n; ++k) {
    int km = (k + n - 1) % n, kp = (k + 1) % n;
    out.values[k] = (f.values[kp] - f.values[km]) / (2.0 * f.grid.dphi);
  }
  return out;
}

inline CircleField second_derivative(const CircleField& f) {
  const int n = f.grid.n_phi;
  CircleField out{f.grid, std::vector<double>(n)};
  const double inv = 1.0 / (f.grid.dphi * f.grid.dphi);
  for (int k = 0; k < n; ++k) {
    int km = (k + n - 1) % n, kp = (k + 1) % n;
    out.values[k] = (f.values[kp] - 2.0 * f.values[k] + f.values[km]) * inv;
  }
  return out;
}

// Staggered edge derivative: value at edge (k, k+1).
inline CircleField edge_derivative(const CircleField& f) {
  const int n = f.grid.n_phi;
  CircleField out{f.grid, std::vector<double>(n)};
  for (int k = 0; k < n; ++k)
    out.values[k] = (f.values[(k + 1) % n] - f.values[k]) / f.grid.dphi;
  return out;
}

inline double lq_norm_circle(const CircleField& f, double q) {
  if (q < 1.0) throw std::invalid_argument("lq_norm_circle: q must be >= 1");
  double total = 0.0;
  for (double v : f.values) total += std::pow(std::abs(v), q);
  return std::pow(total * f.grid.dphi, 1.0 / q);
}

// Total variation of h plus total variation of h': int |h'| + int |h''|.
inline double bv_norm(const CircleField& f) {
  CircleField d1 = derivative(f), d2 = second_derivative(f);
  double a = 0.0, b = 0.0;
  for (int k = 0; k < f.grid.n_phi; ++k) {
    a += std::abs(d1.values[k]);
    b += std::abs(d2.values[k]);
  }
  return (a + b) * f.grid.dphi;
}

inline double sample_circle(const CircleField& f, double phi) {
  const int n = f.grid.n_phi;
  double tk = phi / f.grid.dphi;
  double kf = std::floor(tk);
  double frac = tk - kf;
  int k0 = int(kf) % n;
  if (k0 < 0) k0 += n;
  int k1 = (k0 + 1) % n;
  return (1.0 - frac) * f.values[k0] + frac * f.values[k1];
}

}  // namespace warped

#endif  // WARPED_SPHEREGRID_HPP
